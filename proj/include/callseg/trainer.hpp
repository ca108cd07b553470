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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "callseg/adam.hpp"
#include "callseg/corpus.hpp"
#include "callseg/json_io.hpp"
#include "callseg/metrics.hpp"
#include "callseg/model.hpp"
#include "callseg/npy.hpp"

namespace callseg {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int batch_size = 32;
  int max_epochs = 500;
  int patience = 50;  // epochs without validation-accuracy improvement
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool normalize = true;  // z-score from training features
  // Serial loading and single-threaded gradients. Results do not depend on
  // threading either way, since per-sample gradients are reduced in order.
  bool deterministic = false;
  int threads = 1;
  int prefetch_batches = 2;

  void validate() const;  // throws kConfig
  AdamConfig adam() const { return {learning_rate, beta1, beta2, eps}; }
};

void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);  // overlay

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 1-based; 0 before any epoch
  bool stopped_early = false;
  std::size_t steps_per_epoch = 0;

  const EpochStats& best() const { return epochs.at(static_cast<std::size_t>(best_epoch - 1)); }
  // epoch,train_loss,train_acc,val_loss,val_acc with %.17g values.
  std::string csv() const;
};

// Monitor that keeps the first epoch reaching the maximum (strict
// improvement) and stops once `patience` epochs pass without one.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);
  // Returns true when `value` improves on every earlier epoch.
  bool update(int epoch, double value);
  bool should_stop(int epoch) const { return best_epoch_ > 0 && epoch - best_epoch_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_value() const { return best_value_; }

 private:
  int patience_;
  int best_epoch_ = 0;
  double best_value_ = -std::numeric_limits<double>::infinity();
};

// Feature array (n_mels, frames) read from an .npy file; throws kShape.
MelSpectrogram load_features(const std::filesystem::path& path);

int class_label(const CorpusItem& item, int n_classes);

using EpochCallback = std::function<void(const EpochStats&)>;

struct TrainResult {
  CrnnModel model;  // weights of the best epoch
  TrainHistory history;
};

// Throws kData for an empty split, kDivergence on a non-finite loss.
TrainResult train(const CrnnModel& model, const std::filesystem::path& corpus_root, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<int> predictions;  // in scan order
};

// Dropout off. Throws kData when the split holds no utterances.
EvalResult evaluate(const CrnnModel& model, const std::filesystem::path& corpus_root, Split split);
EvalResult evaluate_items(const CrnnModel& model, const std::vector<CorpusItem>& items);

}  // namespace callseg
