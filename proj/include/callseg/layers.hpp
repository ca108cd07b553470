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
#include <span>
#include <vector>

#include "callseg/rng.hpp"
#include "callseg/tensor.hpp"

namespace callseg {

// ---------------------------------------------------------------------------
// Convolution: 3x3 kernels, stride 1, zero "same" padding.
// input (C_in, H, W), kernels (C_out, C_in, 3, 3), bias (C_out) -> (C_out, H, W)

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                      const BasicTensor<T>& bias);

template <typename T>
struct Conv2dGrads {
  BasicTensor<T> input;
  BasicTensor<T> kernels;
  BasicTensor<T> bias;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                               const BasicTensor<T>& grad_output);

// ---------------------------------------------------------------------------
// Pointwise activation following each convolution.

enum class Activation { kElu, kLinear };

template <typename T>
BasicTensor<T> activate(const BasicTensor<T>& x, Activation act);

// Multiplies grad in place by the activation derivative, recovered from the
// activation's output.
template <typename T>
void activation_backward(const BasicTensor<T>& output, Activation act, BasicTensor<T>& grad);

// ---------------------------------------------------------------------------
// Max pooling, stride = kernel, ceil mode: trailing partial windows pool over
// their valid elements. Ties go to the first element in row-major order.

struct PoolKernel {
  int rows = 1;  // frequency
  int cols = 1;  // time

  friend bool operator==(const PoolKernel&, const PoolKernel&) = default;
};

constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

template <typename T>
struct MaxPoolResult {
  BasicTensor<T> output;
  std::vector<std::size_t> argmax;  // flat input index per output element
  Shape input_shape;
};

template <typename T>
MaxPoolResult<T> maxpool2d(const BasicTensor<T>& input, PoolKernel kernel);

template <typename T>
BasicTensor<T> maxpool2d_backward(const MaxPoolResult<T>& pooled, const BasicTensor<T>& grad_output);

// ---------------------------------------------------------------------------
// Inverted dropout. In training mode each element is zeroed with probability
// p and survivors are scaled by 1/(1-p); otherwise the input passes through.

template <typename T>
struct DropoutResult {
  BasicTensor<T> output;
  std::vector<T> mask;  // empty when the layer acted as identity
};

template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double p, bool training, Rng* rng);

template <typename T>
BasicTensor<T> dropout_backward(const std::vector<T>& mask, const BasicTensor<T>& grad_output);

// ---------------------------------------------------------------------------
// Recurrent layers. Gate blocks are stored side by side along the second
// axis of each kernel:
//   GRU:  [update z | reset r | candidate n], 3H columns
//   LSTM: [input i | forget f | candidate g | output o], 4H columns
// with input_kernel (F, G*H), recurrent_kernel (H, G*H), bias (G*H).
//
// GRU:   z = sig(x Wz + h Uz + bz)        r = sig(x Wr + h Ur + br)
//        n = tanh(x Wn + (r*h) Un + bn)   h' = (1 - z) * h + z * n
// LSTM:  i, f, o = sig(.)  g = tanh(.)  c' = f*c + i*g  h' = o * tanh(c')

enum class RnnKind { kGru, kLstm };

constexpr int gate_count(RnnKind kind) { return kind == RnnKind::kGru ? 3 : 4; }

template <typename T>
struct RecurrentParams {
  BasicTensor<T> input_kernel;
  BasicTensor<T> recurrent_kernel;
  BasicTensor<T> bias;

  std::size_t input_size() const { return input_kernel.dim(0); }
  std::size_t hidden_size() const { return recurrent_kernel.dim(0); }
};

// Forward caches for backpropagation through time. Rows of `hidden` (and
// `cell`) are the states h_0 .. h_T, so row t+1 is the output of step t.
template <typename T>
struct RecurrentTrace {
  RnnKind kind = RnnKind::kGru;
  BasicTensor<T> inputs;  // (T, F)
  BasicTensor<T> hidden;  // (T+1, H)
  BasicTensor<T> cell;    // (T+1, H), LSTM only
  BasicTensor<T> gates;   // (T, G*H) post-activation gate values

  std::size_t steps() const { return inputs.empty() ? 0 : inputs.dim(0); }
  // (T, H) copy of h_1 .. h_T.
  BasicTensor<T> outputs() const;
};

template <typename T>
struct RecurrentGrads {
  RecurrentParams<T> params;
  BasicTensor<T> inputs;  // (T, F)
  BasicTensor<T> h0;
  BasicTensor<T> c0;  // LSTM only
};

template <typename T>
RecurrentTrace<T> gru_forward(const BasicTensor<T>& inputs, const RecurrentParams<T>& params,
                              const BasicTensor<T>& h0);

template <typename T>
RecurrentTrace<T> lstm_forward(const BasicTensor<T>& inputs, const RecurrentParams<T>& params,
                               const BasicTensor<T>& h0, const BasicTensor<T>& c0);

// grad_outputs is (T, H): the loss gradient w.r.t. each h_1..h_T.
template <typename T>
RecurrentGrads<T> recurrent_backward(const RecurrentTrace<T>& trace,
                                     const RecurrentParams<T>& params,
                                     const BasicTensor<T>& grad_outputs);

// ---------------------------------------------------------------------------
// Dense softmax head and loss.

template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                     const BasicTensor<T>& bias);

// Max-subtracted softmax; throws kNumeric on non-finite logits.
template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits);

template <typename T>
BasicTensor<T> dense_softmax(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& bias) {
  return softmax(dense(input, weights, bias));
}

inline constexpr double kProbabilityFloor = 1e-12;

template <typename T>
T cross_entropy(const BasicTensor<T>& probs, int label);

template <typename T>
T mean_cross_entropy(std::span<const BasicTensor<T>> probs, std::span<const int> labels);

// d(cross_entropy(softmax(z)))/dz = p - onehot(label).
template <typename T>
BasicTensor<T> softmax_cross_entropy_grad(const BasicTensor<T>& probs, int label);

template <typename T>
struct DenseGrads {
  BasicTensor<T> input;
  BasicTensor<T> weights;
  BasicTensor<T> bias;
};

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& grad_logits);

}  // namespace callseg
