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

#include "callseg/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "callseg/error.hpp"

namespace callseg {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (int i = 0; i < n_classes; ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
  std::uint64_t s = 0;
  for (int p = 0; p < n_classes; ++p) s += at(truth, p);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(int pred) const {
  std::uint64_t s = 0;
  for (int t = 0; t < n_classes; ++t) s += at(t, pred);
  return s;
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truths, int k) {
  if (k < 1) fail(ErrorCode::kInput, "class count must be positive");
  if (preds.size() != truths.size()) {
    fail(ErrorCode::kInput, "prediction count " + std::to_string(preds.size()) +
                                " differs from truth count " + std::to_string(truths.size()));
  }
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] >= k || truths[i] < 0 || truths[i] >= k) {
      fail(ErrorCode::kInput, "class index out of range at sample " + std::to_string(i));
    }
    ++cm.at(truths[i], preds[i]);
  }
  return cm;
}

std::vector<ClassScore> class_scores(const ConfusionMatrix& cm) {
  std::vector<ClassScore> out(static_cast<std::size_t>(cm.n_classes));
  for (int c = 0; c < cm.n_classes; ++c) {
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t fp = cm.column_sum(c) - tp;
    const std::uint64_t fn = cm.row_sum(c) - tp;
    ClassScore& s = out[static_cast<std::size_t>(c)];
    s.precision = ratio(tp, tp + fp);
    s.recall = ratio(tp, tp + fn);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * (s.precision * s.recall) / (s.precision + s.recall) : 0.0;
  }
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) fail(ErrorCode::kInput, "accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

Json to_json(const ConfusionMatrix& cm, const LabelConvention& labels) {
  Json rows = Json::array();
  for (int t = 0; t < cm.n_classes; ++t) {
    Json row = Json::array();
    for (int p = 0; p < cm.n_classes; ++p) row.push_back(cm.at(t, p));
    rows.push_back(row);
  }
  return Json{{"orientation", "rows=true,columns=predicted"}, {"labels", labels.names}, {"counts", rows}};
}

Json scores_json(const std::vector<ClassScore>& scores, const LabelConvention& labels) {
  Json out = Json::array();
  for (std::size_t c = 0; c < scores.size(); ++c) {
    out.push_back({{"class", static_cast<int>(c)},
                   {"name", labels.name(static_cast<int>(c))},
                   {"precision", scores[c].precision},
                   {"recall", scores[c].recall},
                   {"f1", scores[c].f1}});
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  for (int t = 0; t < cm.n_classes; ++t) {
    for (int p = 0; p < cm.n_classes; ++p) os << (p ? "," : "") << cm.at(t, p);
    os << '\n';
  }
  return os.str();
}

std::string confusion_plot_csv(const ConfusionMatrix& cm, const LabelConvention& labels) {
  std::ostringstream os;
  os << "true\\predicted";
  for (int p = 0; p < cm.n_classes; ++p) os << ',' << labels.name(p);
  os << '\n';
  for (int t = 0; t < cm.n_classes; ++t) {
    os << labels.name(t);
    for (int p = 0; p < cm.n_classes; ++p) os << ',' << cm.at(t, p);
    os << '\n';
  }
  return os.str();
}

std::string scores_csv(const std::vector<ClassScore>& scores, const LabelConvention& labels) {
  std::ostringstream os;
  os << "class,name,precision,recall,f1\n";
  for (std::size_t c = 0; c < scores.size(); ++c) {
    os << c << ',' << labels.name(static_cast<int>(c)) << ',' << fmt_double(scores[c].precision) << ','
       << fmt_double(scores[c].recall) << ',' << fmt_double(scores[c].f1) << '\n';
  }
  return os.str();
}

}  // namespace callseg
