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

#include <sstream>

#include "callseg/metrics.hpp"
#include "callseg/rng.hpp"
#include "support.hpp"

using namespace callseg;

TEST_SUITE("metrics") {
  TEST_CASE("confusion counts") {
    std::vector<int> t{0, 1, 0};
    auto cm = confusion(t, t, 2);
    CHECK(cm.counts == std::vector<std::uint64_t>{2, 0, 0, 1});
    std::vector<int> p{1, 1}, tr{0, 1};
    CHECK(confusion(p, tr, 2).counts == std::vector<std::uint64_t>{0, 1, 0, 1});
    std::vector<int> none;
    auto z = confusion(none, none, 4);
    CHECK(z.total() == 0);
    CHECK(z.counts.size() == 16);
  }

  TEST_CASE("input validation") {
    std::vector<int> a{0, 1}, b{0};
    CHECK(testing::error_code_of([&] { confusion(a, b, 2); }) == ErrorCode::kInput);
    std::vector<int> c{0, 2};
    CHECK(testing::error_code_of([&] { confusion(c, a, 2); }) == ErrorCode::kInput);
    CHECK(testing::error_code_of([] { accuracy(ConfusionMatrix(2)); }) == ErrorCode::kInput);
  }

  TEST_CASE("scores") {
    ConfusionMatrix diag(3);
    diag.at(0, 0) = 4;
    diag.at(1, 1) = 2;
    auto s = class_scores(diag);
    CHECK(s[0].precision == 1.0);
    CHECK(s[0].f1 == 1.0);
    CHECK(s[1].recall == 1.0);
    CHECK(s[2].precision == 0.0);  // empty class by convention
    CHECK(s[2].recall == 0.0);
    CHECK(s[2].f1 == 0.0);

    ConfusionMatrix cm(2);  // class 0: TP 8, FP 2, FN 2
    cm.at(0, 0) = 8;
    cm.at(0, 1) = 2;
    cm.at(1, 0) = 2;
    cm.at(1, 1) = 5;
    auto q = class_scores(cm);
    CHECK(q[0].precision == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(q[0].recall == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(q[0].f1 == doctest::Approx(0.8).epsilon(1e-15));
  }

  TEST_CASE("accuracy") {
    ConfusionMatrix a(2);
    a.at(0, 0) = 2;
    a.at(1, 1) = 1;
    CHECK(accuracy(a) == 1.0);
    ConfusionMatrix b(2);
    for (auto& v : b.counts) v = 1;
    CHECK(accuracy(b) == 0.5);
  }

  TEST_CASE("row and column sums are truth and prediction counts") {
    Rng rng(5);
    std::vector<int> p(150), t(150);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = static_cast<int>(rng.index(4));
      t[i] = static_cast<int>(rng.index(4));
    }
    auto cm = confusion(p, t, 4);
    for (int c = 0; c < 4; ++c) {
      CHECK(cm.row_sum(c) == static_cast<std::uint64_t>(std::count(t.begin(), t.end(), c)));
      CHECK(cm.column_sum(c) == static_cast<std::uint64_t>(std::count(p.begin(), p.end(), c)));
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hits += p[i] == t[i];
    CHECK(accuracy(cm) == static_cast<double>(hits) / 150.0);
  }

  TEST_CASE("CSV and JSON serializations") {
    ConfusionMatrix cm(2);
    cm.at(0, 0) = 3;
    cm.at(0, 1) = 1;
    cm.at(1, 1) = 7;
    CHECK(confusion_csv(cm) == "3,1\n0,7\n");
    auto labels = LabelConvention::for_classes(2);
    auto plot = confusion_plot_csv(cm, labels);
    CHECK(plot.rfind("true\\predicted,customer,agent\n", 0) == 0);
    CHECK(plot.find("customer,3,1\n") != std::string::npos);
    auto j = to_json(cm, labels);
    CHECK(j.dump().find("customer") != std::string::npos);
    auto s = scores_csv(class_scores(cm), labels);
    CHECK(s.rfind("class,name,precision,recall,f1\n", 0) == 0);
  }

  TEST_CASE("argmax takes the first maximum") {
    std::vector<double> v{0.1, 0.4, 0.4, 0.1};
    CHECK(argmax_index<double>(v) == 1);
    CHECK(argmax_index<double>(std::span<const double>()) == -1);
  }
}
