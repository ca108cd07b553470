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

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "callseg/error.hpp"
#include "callseg/model.hpp"
#include "callseg/tensor.hpp"

namespace callseg {

struct GradientCheckOptions {
  double eps = 1e-4;
  // Running the check in training mode is only meaningful without dropout.
  bool training = false;
};

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Anything exposing mutable parameters, a scalar loss and its analytic
// gradient can be verified against central differences.
template <typename M, typename Input>
concept GradientCheckable = requires(M& m, const M& cm, const Input& x, int label) {
  { m.parameters() } -> std::convertible_to<std::span<Tensor64>>;
  { cm.loss(x, label) } -> std::convertible_to<double>;
  { cm.gradients(x, label) } -> std::convertible_to<std::vector<Tensor64>>;
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// max over every scalar parameter of |analytic - numeric| / max(|a|, |n|, 1e-8)
template <typename M, typename Input>
  requires GradientCheckable<M, Input>
GradientCheckReport gradient_check_generic(M model, const Input& input, int label, double eps) {
  const std::vector<Tensor64> analytic = model.gradients(input, label);
  std::span<Tensor64> params = model.parameters();
  if (analytic.size() != params.size()) fail(ErrorCode::kShape, "gradient/parameter count mismatch");
  GradientCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double saved = params[p][i];
      params[p][i] = saved + eps;
      const double up = model.loss(input, label);
      params[p][i] = saved - eps;
      const double down = model.loss(input, label);
      params[p][i] = saved;
      const double err = relative_error(analytic[p][i], (up - down) / (2.0 * eps));
      ++report.checked;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_parameter = p;
        report.worst_index = i;
      }
    }
  }
  return report;
}

// Verifies every CRNN parameter gradient. Float models raise kPrecision;
// training mode with dropout active raises kState.
template <typename T>
GradientCheckReport gradient_check(const BasicCrnn<T>& model, const BasicTensor<T>& input, int label,
                                   const GradientCheckOptions& options = {});

}  // namespace callseg
