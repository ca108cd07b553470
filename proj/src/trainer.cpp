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

#include "callseg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "callseg/error.hpp"
#include "callseg/rng.hpp"

namespace callseg {
namespace fs = std::filesystem;

void TrainConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::kConfig, m); };
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) bad("learning_rate must be finite and >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) bad("betas must lie in [0, 1)");
  if (!(eps > 0.0)) bad("eps must be positive");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (max_epochs < 1) bad("max_epochs must be >= 1");
  if (patience < 1) bad("patience must be >= 1");
  if (threads < 1) bad("threads must be >= 1");
  if (prefetch_batches < 0) bad("prefetch_batches must be >= 0");
}

namespace {

template <typename V>
void overlay(const Json& j, const char* key, V& value) {
  if (j.contains(key)) j.at(key).get_to(value);
}

}  // namespace

void to_json(Json& j, const TrainConfig& c) {
  j = Json{{"learning_rate", c.learning_rate},
           {"beta1", c.beta1},
           {"beta2", c.beta2},
           {"eps", c.eps},
           {"batch_size", c.batch_size},
           {"max_epochs", c.max_epochs},
           {"patience", c.patience},
           {"seed", c.seed},
           {"shuffle", c.shuffle},
           {"normalize", c.normalize},
           {"deterministic", c.deterministic},
           {"threads", c.threads},
           {"prefetch_batches", c.prefetch_batches}};
}

void from_json(const Json& j, TrainConfig& c) {
  try {
    overlay(j, "learning_rate", c.learning_rate);
    overlay(j, "beta1", c.beta1);
    overlay(j, "beta2", c.beta2);
    overlay(j, "eps", c.eps);
    overlay(j, "batch_size", c.batch_size);
    overlay(j, "max_epochs", c.max_epochs);
    overlay(j, "patience", c.patience);
    overlay(j, "seed", c.seed);
    overlay(j, "shuffle", c.shuffle);
    overlay(j, "normalize", c.normalize);
    overlay(j, "deterministic", c.deterministic);
    overlay(j, "threads", c.threads);
    overlay(j, "prefetch_batches", c.prefetch_batches);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kConfig, std::string("train config: ") + e.what());
  }
}

std::string TrainHistory::csv() const {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.train_loss, e.train_acc,
                  e.val_loss, e.val_acc);
    out += buf;
  }
  return out;
}

EarlyStopping::EarlyStopping(int patience) : patience_(patience) {
  if (patience < 1) fail(ErrorCode::kConfig, "patience must be >= 1");
}

bool EarlyStopping::update(int epoch, double value) {
  if (value > best_value_) {
    best_value_ = value;
    best_epoch_ = epoch;
    return true;
  }
  return false;
}

MelSpectrogram load_features(const fs::path& path) {
  auto arr = load_npy(path);
  if (arr.shape.size() != 2) {
    fail(ErrorCode::kShape, path.string() + ": features must be 2-D (mels, frames)");
  }
  MelSpectrogram m;
  m.n_mels = static_cast<int>(arr.shape[0]);
  m.n_frames = static_cast<int>(arr.shape[1]);
  m.values = std::move(arr.data);
  return m;
}

int class_label(const CorpusItem& item, int n_classes) {
  return n_classes == 4 ? item.label4 : item.label2;
}

namespace {

// Loads features for consecutive batches of `order`, optionally on a
// producer thread with a bounded queue. Batches arrive in order either way.
class FeatureStream {
 public:
  FeatureStream(const std::vector<CorpusItem>& items, std::vector<std::size_t> order, std::size_t batch,
                std::size_t depth, bool async)
      : items_(items), order_(std::move(order)), batch_(batch), depth_(std::max<std::size_t>(1, depth)) {
    if (async) worker_ = std::thread([this] { produce(); });
  }

  ~FeatureStream() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
  }

  // False once every batch has been handed out.
  bool next(std::vector<MelSpectrogram>& out) {
    if (!worker_.joinable()) {
      if (cursor_ >= order_.size()) return false;
      out = load_batch(cursor_);
      cursor_ += batch_;
      return true;
    }
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return !queue_.empty() || done_; });
    if (!queue_.empty()) {
      out = std::move(queue_.front());
      queue_.pop_front();
      cv_.notify_all();
      return true;
    }
    if (error_) std::rethrow_exception(error_);
    return false;
  }

 private:
  std::vector<MelSpectrogram> load_batch(std::size_t begin) const {
    std::vector<MelSpectrogram> b;
    std::size_t end = std::min(order_.size(), begin + batch_);
    for (std::size_t i = begin; i < end; ++i) b.push_back(load_features(items_[order_[i]].path));
    return b;
  }

  void produce() {
    try {
      for (std::size_t pos = 0; pos < order_.size(); pos += batch_) {
        auto b = load_batch(pos);
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return queue_.size() < depth_ || stop_; });
        if (stop_) return;
        queue_.push_back(std::move(b));
        cv_.notify_all();
      }
    } catch (...) {
      std::lock_guard lock(mu_);
      error_ = std::current_exception();
    }
    std::lock_guard lock(mu_);
    done_ = true;
    cv_.notify_all();
  }

  const std::vector<CorpusItem>& items_;
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t depth_;
  std::size_t cursor_ = 0;
  std::thread worker_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::vector<MelSpectrogram>> queue_;
  std::exception_ptr error_;
  bool done_ = false;
  bool stop_ = false;
};

struct SampleResult {
  std::vector<Tensor> grads;
  double loss = 0.0;
  bool correct = false;
};

SampleResult train_sample(const CrnnModel& model, const MelSpectrogram& f, int label, std::uint64_t seed) {
  Rng rng(seed);
  auto trace = model.forward_trace(model.prepare_input(f), true, &rng);
  SampleResult r;
  r.loss = cross_entropy(trace.probs, label);
  r.correct = argmax_index<float>(trace.probs.values()) == label;
  r.grads = model.backward_trace(trace, label);
  return r;
}

}  // namespace

EvalResult evaluate_items(const CrnnModel& model, const std::vector<CorpusItem>& items) {
  if (items.empty()) fail(ErrorCode::kData, "no utterances to evaluate");
  const int k = model.config().n_classes;
  EvalResult r;
  std::vector<int> truths;
  double loss = 0.0;
  for (const auto& item : items) {
    int label = class_label(item, k);
    auto probs = model.predict(load_features(item.path));
    loss += cross_entropy(probs, label);
    r.predictions.push_back(argmax_index<float>(probs.values()));
    truths.push_back(label);
  }
  r.confusion = confusion(r.predictions, truths, k);
  r.loss = loss / static_cast<double>(items.size());
  r.accuracy = accuracy(r.confusion);
  return r;
}

EvalResult evaluate(const CrnnModel& model, const fs::path& corpus_root, Split split) {
  auto items = scan_corpus(corpus_root, split);
  if (items.empty()) {
    fail(ErrorCode::kData, std::string(to_string(split)) + " split of " + corpus_root.string() + " is empty");
  }
  return evaluate_items(model, items);
}

TrainResult train(const CrnnModel& initial, const fs::path& corpus_root, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  auto train_items = scan_corpus(corpus_root, Split::kTrain);
  auto val_items = scan_corpus(corpus_root, Split::kValidation);
  if (train_items.empty()) fail(ErrorCode::kData, "training split of " + corpus_root.string() + " is empty");
  if (val_items.empty()) fail(ErrorCode::kData, "validation split of " + corpus_root.string() + " is empty");

  CrnnModel model = initial;
  const int k = model.config().n_classes;
  if (config.normalize) {
    // training features only
    NormalizationAccumulator acc;
    for (const auto& item : train_items) acc.add(load_features(item.path).values);
    model.set_normalization(acc.finish());
  }

  const std::size_t n = train_items.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const bool serial = config.deterministic;
  const std::size_t threads = serial ? 1 : static_cast<std::size_t>(config.threads);

  auto adam = make_adam_state<float>(model.parameters(), config.adam());
  EarlyStopping stopper(config.patience);
  std::vector<Tensor> best(model.parameters().begin(), model.parameters().end());
  TrainResult result{model, {}};
  result.history.steps_per_epoch = (n + batch - 1) / batch;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      Rng rng(derive_seed(config.seed + static_cast<std::uint64_t>(epoch), 0x5f1e));
      rng.shuffle(std::span<std::size_t>(order));
    }
    const std::vector<std::size_t> epoch_order = order;
    FeatureStream stream(train_items, std::move(order), batch,
                         static_cast<std::size_t>(config.prefetch_batches),
                         !serial && config.prefetch_batches > 0);

    double loss_sum = 0.0;
    std::size_t correct = 0, position = 0, batch_index = 0;
    std::vector<MelSpectrogram> feats;
    while (stream.next(feats)) {
      const std::size_t m = feats.size();
      std::vector<SampleResult> results(m);
      auto work = [&](std::size_t i) {
        const auto& item = train_items[epoch_order[position + i]];
        auto seed = derive_seed(config.seed, 0xd40f,
                                (static_cast<std::uint64_t>(epoch) << 32) + position + i);
        results[i] = train_sample(model, feats[i], class_label(item, k), seed);
      };
      try {
        if (threads <= 1 || m <= 1) {
          for (std::size_t i = 0; i < m; ++i) work(i);
        } else {
          std::vector<std::thread> pool;
          std::vector<std::exception_ptr> errors(threads);
          for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
              try {
                for (std::size_t i = t; i < m; i += threads) work(i);
              } catch (...) {
                errors[t] = std::current_exception();
              }
            });
          }
          for (auto& th : pool) th.join();
          for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumeric) throw;
        fail(ErrorCode::kDivergence, "epoch " + std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index) + ": " + e.detail());
      }

      // fixed-order reduction
      std::vector<Tensor> grads = std::move(results[0].grads);
      for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t p = 0; p < grads.size(); ++p) {
          auto dst = grads[p].values();
          auto src = results[i].grads[p].values();
          for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += src[q];
        }
      }
      const float scale = 1.0f / static_cast<float>(m);
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        batch_loss += results[i].loss;
        correct += results[i].correct ? 1 : 0;
      }
      if (!std::isfinite(batch_loss)) {
        fail(ErrorCode::kDivergence, "epoch " + std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index) + ": non-finite loss");
      }
      for (auto& g : grads) {
        for (auto& v : g.values()) v *= scale;
      }
      adam_step<float>(model.parameters(), grads, adam);
      loss_sum += batch_loss;
      position += m;
      ++batch_index;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_acc = static_cast<double>(correct) / static_cast<double>(n);
    auto ev = evaluate_items(model, val_items);
    stats.val_loss = ev.loss;
    stats.val_acc = ev.accuracy;
    result.history.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (stopper.update(epoch, stats.val_acc)) {
      std::copy(model.parameters().begin(), model.parameters().end(), best.begin());
    }
    if (stopper.should_stop(epoch)) {
      result.history.stopped_early = epoch < config.max_epochs;
      break;
    }
  }

  result.history.best_epoch = stopper.best_epoch();
  std::copy(best.begin(), best.end(), model.parameters().begin());
  result.model = std::move(model);
  return result;
}

}  // namespace callseg
