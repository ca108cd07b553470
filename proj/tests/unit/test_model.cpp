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
#include "callseg/gradcheck.hpp"
#include "callseg/model.hpp"
#include "callseg/rng.hpp"
#include "support.hpp"

using namespace callseg;

namespace {

// Hand-written parameter count for the CRNN layout.
std::size_t oracle_count(const ModelConfig& c) {
  std::size_t n = 0, in = 1;
  for (int f : c.conv_filters) {
    n += in * static_cast<std::size_t>(f) * 9 + static_cast<std::size_t>(f);
    in = static_cast<std::size_t>(f);
  }
  const std::size_t g = c.rnn_kind == RnnKind::kGru ? 3 : 4;
  for (int h : c.rnn_hidden) {
    const auto hh = static_cast<std::size_t>(h);
    n += g * (in * hh + hh * hh + hh);
    in = hh;
  }
  return n + in * static_cast<std::size_t>(c.n_classes) + static_cast<std::size_t>(c.n_classes);
}

ModelConfig tiny_config(RnnKind kind) {
  ModelConfig c;
  c.conv_filters = {2, 2, 2, 2};
  c.rnn_hidden = {3, 3};
  c.pool_kernels = {{{2, 2}, {2, 2}, {2, 2}, {2, 1}}};
  c.input_height = 16;
  c.input_frames = 24;
  c.rnn_kind = kind;
  c.dropout_p = 0.0;
  c.n_classes = 4;
  return c;
}

template <typename T>
BasicTensor<T> random_input(const ModelConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  BasicTensor<T> x({1, static_cast<std::size_t>(c.input_height), static_cast<std::size_t>(c.input_frames)});
  for (auto& v : x.values()) v = static_cast<T>(rng.normal());
  return x;
}

// Loss linear in every parameter: sum(conv(x) * r).
struct LinearNet {
  std::vector<Tensor64> params;
  Tensor64 r;

  std::span<Tensor64> parameters() { return params; }
  double loss(const Tensor64& x, int) const {
    auto y = conv2d(x, params[0], params[1]);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
    return s;
  }
  std::vector<Tensor64> gradients(const Tensor64& x, int) const {
    auto g = conv2d_backward(x, params[0], r);
    return {g.kernels, g.bias};
  }
};

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("default stack maps (96, 1000) to (32, 1, 42)") {
    ModelConfig c;
    auto s = c.conv_output();
    CHECK(s.channels == 32);
    CHECK(s.height == 1);
    CHECK(s.frames == 42);
    auto model = build_crnn(c, 1);
    Rng rng(2);
    Tensor x({1, 96, 1000});
    for (auto& v : x.values()) v = static_cast<float>(rng.normal());
    auto tr = model.forward_trace(x, false, nullptr);
    CHECK(tr.conv_features.shape() == Shape{32, 1, 42});
    CHECK(tr.sequence.shape() == Shape{42, 32});
    CHECK(tr.rnn[0].outputs().shape() == Shape{42, 84});
    CHECK(tr.last_hidden.shape() == Shape{84});
    CHECK(tr.probs.shape() == Shape{2});
  }

  TEST_CASE("block shapes follow ceil division") {
    ModelConfig c;
    CHECK(c.block_output(0).height == 48);
    CHECK(c.block_output(0).frames == 500);
    CHECK(c.block_output(1).height == 16);
    CHECK(c.block_output(1).frames == 167);
    CHECK(c.block_output(2).height == 4);
    CHECK(c.block_output(2).frames == 84);
  }

  TEST_CASE("parameter counts") {
    for (RnnKind kind : {RnnKind::kGru, RnnKind::kLstm}) {
      ModelConfig two;
      two.rnn_kind = kind;
      ModelConfig four = two;
      four.n_classes = 4;
      CHECK(count_params(two) == oracle_count(two));
      CHECK(count_params(four) == oracle_count(four));
      CHECK(count_params(four) - count_params(two) == 170);
      CHECK(build_crnn(four, 3).parameter_count() == count_params(four));
    }
    // LSTM - GRU per layer = F*H + H*H + H
    ModelConfig gru, lstm;
    lstm.rnn_kind = RnnKind::kLstm;
    const std::size_t l1 = 32 * 84 + 84 * 84 + 84, l2 = 84 * 84 + 84 * 84 + 84;
    CHECK(count_params(lstm) - count_params(gru) == l1 + l2);

    ModelConfig tiny;
    tiny.conv_filters = {1, 1, 1, 1};
    tiny.rnn_hidden = {1, 1};
    // 4 conv blocks of 9 + 1, two GRU layers of 3 * (1 + 1 + 1), dense 1*2 + 2
    CHECK(count_params(tiny) == 40 + 18 + 4);
    tiny.rnn_kind = RnnKind::kLstm;
    CHECK(count_params(tiny) == 40 + 24 + 4);
  }

  TEST_CASE("pools that leave height above 1 are Config errors") {
    ModelConfig c;
    c.pool_kernels[3] = {2, 2};
    CHECK(testing::error_code_of([&] { c.validate(); }) == ErrorCode::kConfig);
    CHECK(testing::error_code_of([&] { build_crnn(c, 1); }) == ErrorCode::kConfig);
    ModelConfig k;
    k.n_classes = 3;
    CHECK(testing::error_code_of([&] { k.validate(); }) == ErrorCode::kConfig);
  }

  TEST_CASE("same seed gives identical parameters") {
    auto c = tiny_config(RnnKind::kLstm);
    auto a = build_crnn(c, 42), b = build_crnn(c, 42), d = build_crnn(c, 43);
    for (std::size_t i = 0; i < a.parameters().size(); ++i) CHECK(a.parameters()[i] == b.parameters()[i]);
    CHECK(!(a.parameters()[0] == d.parameters()[0]));
  }

  TEST_CASE("orthogonal recurrent kernels and zero biases") {
    auto m = build_crnn<double>(tiny_config(RnnKind::kGru), 5);
    const auto& u = m.parameters()[9];  // rnn0.recurrent_kernel (3, 9)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 9; ++k) s += u.at(i, k) * u.at(j, k);
        CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      }
    for (double v : m.parameters()[1].values()) CHECK(v == 0.0);
  }

  TEST_CASE("zeroed dense head gives uniform probabilities") {
    auto c = tiny_config(RnnKind::kGru);
    auto m = build_crnn(c, 7);
    auto params = m.parameters();
    for (auto& v : params[params.size() - 2].values()) v = 0.0f;
    auto p = m.predict_input(random_input<float>(c, 1));
    for (float v : p.values()) CHECK(v == doctest::Approx(0.25f));
  }

  TEST_CASE("inference is pure and probabilities sum to one") {
    auto c = tiny_config(RnnKind::kLstm);
    auto m = build_crnn(c, 8);
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto x = random_input<float>(c, s);
      auto a = m.predict_input(x), b = m.predict_input(x);
      CHECK(a == b);
      double sum = 0.0;
      for (float v : a.values()) sum += v;
      CHECK(std::abs(sum - 1.0) < 1e-6);
    }
  }

  TEST_CASE("training-mode forward is reproducible with a fixed seed") {
    auto c = tiny_config(RnnKind::kGru);
    c.dropout_p = 0.3;
    auto m = build_crnn(c, 9);
    auto x = random_input<float>(c, 3);
    Rng r1(77), r2(77);
    CHECK(m.forward_trace(x, true, &r1).probs == m.forward_trace(x, true, &r2).probs);
  }

  TEST_CASE("shape mismatch and backward without forward") {
    auto c = tiny_config(RnnKind::kGru);
    auto m = build_crnn(c, 10);
    CHECK(testing::error_code_of([&] { m.predict_input(Tensor({1, 16, 23})); }) == ErrorCode::kShape);
    MelSpectrogram f;
    f.n_mels = 96;
    f.n_frames = 24;
    f.values.assign(96 * 24, 0.0f);
    CHECK(testing::error_code_of([&] { m.predict(f); }) == ErrorCode::kShape);
    CHECK(testing::error_code_of([&] { m.backward(0); }) == ErrorCode::kState);
    m.forward(random_input<float>(c, 1), false, nullptr);
    CHECK(m.backward(1).size() == m.parameters().size());
  }

  TEST_CASE("duplicated input gives identical gradients") {
    auto c = tiny_config(RnnKind::kLstm);
    auto m = build_crnn<double>(c, 11);
    auto x = random_input<double>(c, 4);
    auto g1 = m.backward_trace(m.forward_trace(x, false, nullptr), 2);
    auto g2 = m.backward_trace(m.forward_trace(x, false, nullptr), 2);
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g2[i]);
  }
}

TEST_SUITE("gradcheck") {
  TEST_CASE("tiny CRNN gradients match central differences") {
    for (RnnKind kind : {RnnKind::kGru, RnnKind::kLstm}) {
      CAPTURE(to_string(kind));
      auto c = tiny_config(kind);
      auto m = build_crnn<double>(c, 21);
      auto report = gradient_check(m, random_input<double>(c, 22), 1);
      CHECK(report.checked == m.parameter_count());
      CHECK(report.max_relative_error < 1e-4);
    }
  }

  TEST_CASE("linear network is exact") {
    Rng rng(23);
    LinearNet net;
    net.params = {Tensor64({2, 1, 3, 3}), Tensor64({2})};
    for (auto& p : net.params)
      for (auto& v : p.values()) v = rng.uniform(-1, 1);
    net.r = Tensor64({2, 5, 6});
    for (auto& v : net.r.values()) v = rng.uniform(-1, 1);
    Tensor64 x({1, 5, 6});
    for (auto& v : x.values()) v = rng.uniform(-1, 1);
    auto report = gradient_check_generic(net, x, 0, 1e-4);
    CHECK(report.max_relative_error < 1e-7);
  }

  TEST_CASE("preconditions") {
    auto c = tiny_config(RnnKind::kGru);
    auto f = build_crnn<float>(c, 1);
    CHECK(testing::error_code_of([&] { gradient_check(f, random_input<float>(c, 1), 0); }) == ErrorCode::kPrecision);
    c.dropout_p = 0.1;
    auto d = build_crnn<double>(c, 1);
    GradientCheckOptions opt;
    opt.training = true;
    CHECK(testing::error_code_of([&] { gradient_check(d, random_input<double>(c, 1), 0, opt); }) == ErrorCode::kState);
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("round trip is bit exact") {
    testing::TempDir dir;
    auto c = tiny_config(RnnKind::kLstm);
    c.dropout_p = 0.2;
    auto m = build_crnn(c, 31);
    m.set_normalization({true, -12.5, 3.25});
    save_checkpoint(m, dir / "m.ckpt");
    auto back = load_checkpoint(dir / "m.ckpt");
    CHECK(back.config() == m.config());
    CHECK(back.config().rnn_kind == RnnKind::kLstm);
    CHECK(back.labels() == m.labels());
    CHECK(back.normalization().enabled);
    CHECK(back.normalization().mean == -12.5);
    CHECK(back.normalization().stddev == 3.25);
    for (std::size_t i = 0; i < m.parameters().size(); ++i) CHECK(back.parameters()[i] == m.parameters()[i]);
    CHECK(encode_checkpoint(back) == encode_checkpoint(m));
  }

  TEST_CASE("damaged files are Checkpoint errors") {
    auto m = build_crnn(tiny_config(RnnKind::kGru), 32);
    auto bytes = encode_checkpoint(m);
    auto truncated = bytes;
    truncated.resize(bytes.size() - 9);
    CHECK(testing::error_code_of([&] { decode_checkpoint(truncated); }) == ErrorCode::kCheckpoint);
    auto flipped = bytes;
    flipped[bytes.size() - 20] ^= 0x40;
    CHECK(testing::error_code_of([&] { decode_checkpoint(flipped); }) == ErrorCode::kCheckpoint);
    auto version = bytes;
    version[8] = 9;
    CHECK(testing::error_code_of([&] { decode_checkpoint(version); }) == ErrorCode::kCheckpoint);
    auto magic = bytes;
    magic[0] = 'X';
    CHECK(testing::error_code_of([&] { decode_checkpoint(magic); }) == ErrorCode::kCheckpoint);
    auto extra = bytes;
    extra.push_back(0);
    CHECK(testing::error_code_of([&] { decode_checkpoint(extra); }) == ErrorCode::kCheckpoint);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "CSEGCKPT");
  }
}
