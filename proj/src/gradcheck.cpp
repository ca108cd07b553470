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

#include "callseg/gradcheck.hpp"

namespace callseg {

namespace {

// Adapts the CRNN to the GradientCheckable interface.
class CrnnObjective {
 public:
  CrnnObjective(CrnnModel64 model, bool training) : model_(std::move(model)), training_(training) {}

  std::span<Tensor64> parameters() { return model_.parameters(); }

  double loss(const Tensor64& input, int label) const {
    Rng rng(0);
    return cross_entropy(model_.forward_trace(input, training_, &rng).probs, label);
  }

  std::vector<Tensor64> gradients(const Tensor64& input, int label) const {
    Rng rng(0);
    return model_.backward_trace(model_.forward_trace(input, training_, &rng), label);
  }

 private:
  CrnnModel64 model_;
  bool training_;
};

}  // namespace

template <>
GradientCheckReport gradient_check(const BasicCrnn<float>&, const BasicTensor<float>&, int,
                                   const GradientCheckOptions&) {
  fail(ErrorCode::kPrecision, "gradient checks require a 64-bit model; cast<double>() first");
}

template <>
GradientCheckReport gradient_check(const BasicCrnn<double>& model, const BasicTensor<double>& input,
                                   int label, const GradientCheckOptions& options) {
  if (options.training && model.config().dropout_p > 0.0) {
    fail(ErrorCode::kState, "gradient check with dropout enabled compares different random masks");
  }
  if (!(options.eps > 0.0)) fail(ErrorCode::kConfig, "finite-difference eps must be positive");
  return gradient_check_generic(CrnnObjective(model, options.training), input, label, options.eps);
}

}  // namespace callseg
