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
#include <span>
#include <string>
#include <vector>

#include "callseg/json_io.hpp"
#include "callseg/labels.hpp"

namespace callseg {

// counts[t][p]: rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<std::uint64_t> counts;

  explicit ConfusionMatrix(int k = 0) : n_classes(k), counts(static_cast<std::size_t>(k) * k, 0) {}

  std::uint64_t& at(int truth, int pred) { return counts[static_cast<std::size_t>(truth) * n_classes + pred]; }
  std::uint64_t at(int truth, int pred) const {
    return counts[static_cast<std::size_t>(truth) * n_classes + pred];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(int truth) const;
  std::uint64_t column_sum(int pred) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws kInput on length mismatch or an index outside [0, k).
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truths, int k);

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per class: TP = cm[c][c], FP = column sum - TP, FN = row sum - TP.
// A zero denominator yields 0 for that ratio; f1 is 0 when p + r = 0.
std::vector<ClassScore> class_scores(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);  // kInput when empty

// Index of the first maximum; -1 for an empty range.
template <typename T>
int argmax_index(std::span<const T> values) {
  int best = values.empty() ? -1 : 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Json to_json(const ConfusionMatrix& cm, const LabelConvention& labels);
Json scores_json(const std::vector<ClassScore>& scores, const LabelConvention& labels);

// Bare counts, one row per true class.
std::string confusion_csv(const ConfusionMatrix& cm);
// Labeled grid for plotting: header of predicted names, first column true names.
std::string confusion_plot_csv(const ConfusionMatrix& cm, const LabelConvention& labels);
std::string scores_csv(const std::vector<ClassScore>& scores, const LabelConvention& labels);

}  // namespace callseg
