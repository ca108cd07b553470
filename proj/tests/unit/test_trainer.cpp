// Copyright 2026 The callseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "callseg/checkpoint.hpp"
#include "callseg/corpus.hpp"
#include "callseg/npy.hpp"
#include "callseg/trainer.hpp"
#include "support.hpp"

using namespace callseg;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kFrames = 4;

// 96 mels collapse through 4, 4, 3, 2; frames stay at 4.
ModelConfig small_config(int n_classes) {
  ModelConfig c;
  c.conv_filters = {2, 2, 2, 2};
  c.pool_kernels = {{{4, 1}, {4, 1}, {3, 1}, {2, 1}}};
  c.rnn_hidden = {4, 4};
  c.input_frames = static_cast<int>(kFrames);
  c.n_classes = n_classes;
  return c;
}

// Writes `count` feature files per speaker; each class gets a distinct offset
// so that the task is learnable.
void write_features(const fs::path& root, Split split, int label4, const std::string& speaker, int count,
                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(96 * kFrames);
  const std::size_t shape[2] = {96, kFrames};
  for (int j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool band = (i / kFrames) / 24 == static_cast<std::size_t>(label4);
      v[i] = static_cast<float>(rng.normal() * 0.5 + (band ? 2.0 : -1.0));
    }
    const fs::path p = root / utterance_path(split, role_of(label4), gender_of(label4), speaker, j);
    fs::create_directories(p.parent_path());
    save_npy(p, v, shape);
  }
}

void small_corpus(const fs::path& root) {
  for (int c = 0; c < 4; ++c) {
    write_features(root, Split::kTrain, c, "t" + std::to_string(c), 12, 100 + c);
    write_features(root, Split::kValidation, c, "v" + std::to_string(c), 4, 200 + c);
  }
}

TrainConfig quick(int epochs) {
  TrainConfig t;
  t.batch_size = 8;
  t.max_epochs = epochs;
  t.patience = epochs;
  t.seed = 3;
  t.deterministic = true;
  return t;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("early stopping arithmetic") {
    EarlyStopping es(3);
    CHECK(es.update(1, 0.5));
    CHECK(!es.update(2, 0.5));  // ties do not count
    CHECK(!es.should_stop(3));
    CHECK(!es.update(4, 0.4));
    CHECK(es.should_stop(4));
    EarlyStopping up(2);
    for (int e = 1; e <= 10; ++e) {
      CHECK(up.update(e, e * 0.1));
      CHECK(!up.should_stop(e));
    }
    CHECK(up.best_epoch() == 10);
  }

  TEST_CASE("constant predictor accuracy on the held-out counts") {
    testing::TempDir dir;
    std::vector<float> zeros(96 * kFrames, 0.0f);
    fs::create_directories(dir / "validation/customer/male/cu");
    fs::create_directories(dir / "validation/agent/female/ag");
    const std::size_t shape[2] = {96, kFrames};
    for (int j = 0; j < 801; ++j)
      save_npy(dir / utterance_path(Split::kValidation, Role::kCustomer, Gender::kMale, "cu", j).string(), zeros,
               shape);
    for (int j = 0; j < 2211; ++j)
      save_npy(dir / utterance_path(Split::kValidation, Role::kAgent, Gender::kFemale, "ag", j).string(), zeros,
               shape);
    auto model = build_crnn(small_config(2), 1);
    auto params = model.parameters();
    params[14].fill(0.0f);
    params[15] = Tensor({2}, {5.0f, 0.0f});
    auto r = evaluate(model, dir.path(), Split::kValidation);
    CHECK(r.accuracy == doctest::Approx(801.0 / 3012.0).epsilon(1e-15));
    CHECK(r.accuracy == doctest::Approx(0.2659).epsilon(1e-4));
    CHECK(r.confusion.at(0, 0) == 801);
    CHECK(r.confusion.at(1, 0) == 2211);
    CHECK(r.confusion.column_sum(1) == 0);
    CHECK(r.predictions.size() == 3012);
  }

  TEST_CASE("zero head starts at ln K") {
    testing::TempDir dir;
    small_corpus(dir.path());
    auto model = build_crnn(small_config(4), 2);
    model.parameters()[14].fill(0.0f);
    auto r = evaluate(model, dir.path(), Split::kValidation);
    CHECK(r.loss == doctest::Approx(std::log(4.0)).epsilon(1e-6));
  }

  TEST_CASE("frozen weights stop after patience epochs") {
    testing::TempDir dir;
    small_corpus(dir.path());
    auto cfg = quick(40);
    cfg.learning_rate = 0.0;
    cfg.patience = 3;
    auto model = build_crnn(small_config(4), 4);
    auto res = train(model, dir.path(), cfg);
    CHECK(res.history.epochs.size() == 4);
    CHECK(res.history.best_epoch == 1);
    CHECK(res.history.stopped_early);
    CHECK(res.history.steps_per_epoch == 6);  // ceil(48 / 8)
    for (std::size_t i = 0; i < res.model.parameters().size(); ++i)
      CHECK(res.model.parameters()[i] == model.parameters()[i]);
  }

  TEST_CASE("training learns and is reproducible") {
    testing::TempDir dir;
    small_corpus(dir.path());
    auto cfg = quick(12);
    cfg.learning_rate = 0.01;
    auto model = build_crnn(small_config(4), 5);
    std::vector<int> seen;
    auto a = train(model, dir.path(), cfg, [&](const EpochStats& s) { seen.push_back(s.epoch); });
    auto b = train(model, dir.path(), cfg);
    CHECK(seen.size() == a.history.epochs.size());
    CHECK(a.history.csv() == b.history.csv());
    CHECK(encode_checkpoint(a.model) == encode_checkpoint(b.model));
    CHECK(a.history.best().val_acc > 0.5);
    CHECK(a.history.epochs.back().train_loss < a.history.epochs.front().train_loss);
    CHECK(a.model.normalization().enabled);

    // threads and prefetch do not change the result
    cfg.deterministic = false;
    cfg.threads = 2;
    auto c = train(model, dir.path(), cfg);
    CHECK(c.history.csv() == a.history.csv());
    CHECK(encode_checkpoint(c.model) == encode_checkpoint(a.model));
  }

  TEST_CASE("empty splits are Data errors") {
    testing::TempDir dir;
    auto model = build_crnn(small_config(4), 6);
    CHECK(testing::error_code_of([&] { train(model, dir.path(), quick(1)); }) == ErrorCode::kData);
    write_features(dir.path(), Split::kTrain, 0, "x", 2, 1);
    CHECK(testing::error_code_of([&] { train(model, dir.path(), quick(1)); }) == ErrorCode::kData);
    CHECK(testing::error_code_of([&] { evaluate(model, dir.path(), Split::kValidation); }) == ErrorCode::kData);
  }

  TEST_CASE("config validation") {
    TrainConfig t;
    t.batch_size = 0;
    CHECK(testing::error_code_of([&] { t.validate(); }) == ErrorCode::kConfig);
    TrainConfig o;
    from_json(Json{{"learning_rate", 0.5}, {"patience", 4}}, o);
    CHECK(o.learning_rate == 0.5);
    CHECK(o.patience == 4);
    CHECK(o.batch_size == 32);
  }
}
