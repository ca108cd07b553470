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

#include "callseg/adam.hpp"

#include <cmath>

namespace callseg {

template <typename T>
void adam_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads,
               AdamState<T>& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    fail(ErrorCode::kShape, "Adam parameter/gradient/state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape() || params[i].shape() != state.first_moment[i].shape() ||
        params[i].shape() != state.second_moment[i].shape()) {
      fail(ErrorCode::kShape, "Adam shape mismatch at parameter " + std::to_string(i));
    }
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(c.beta1);
  const T b2 = static_cast<T>(c.beta2);
  const T correction1 = static_cast<T>(1.0 / (1.0 - std::pow(c.beta1, t)));
  const T correction2 = static_cast<T>(1.0 / (1.0 - std::pow(c.beta2, t)));
  const T lr = static_cast<T>(c.learning_rate);
  const T eps = static_cast<T>(c.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    T* p = params[i].data();
    const T* g = grads[i].data();
    T* m = state.first_moment[i].data();
    T* v = state.second_moment[i].data();
    for (std::size_t j = 0; j < params[i].size(); ++j) {
      m[j] = b1 * m[j] + (T{1} - b1) * g[j];
      v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
      const T m_hat = m[j] * correction1;
      const T v_hat = v[j] * correction2;
      p[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template void adam_step(std::span<BasicTensor<float>>, std::span<const BasicTensor<float>>,
                        AdamState<float>&);
template void adam_step(std::span<BasicTensor<double>>, std::span<const BasicTensor<double>>,
                        AdamState<double>&);

}  // namespace callseg
