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

#include "callseg/layers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace callseg {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <typename T>
using VecMap = Eigen::Map<RowVec<T>>;
template <typename T>
using ConstVecMap = Eigen::Map<const RowVec<T>>;

template <typename T>
ConstMatMap<T> as_matrix(const BasicTensor<T>& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap<T>(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

template <typename T>
MatMap<T> as_matrix(BasicTensor<T>& t, std::size_t rows, std::size_t cols) {
  return MatMap<T>(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

template <typename T>
T sigmoid(T x) {
  return T{1} / (T{1} + std::exp(-x));
}

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::kShape, message);
}

// Rows of `cols` are (channel, ky, kx); columns are output pixels (y, x).
template <typename T>
void im2col(const T* in, std::size_t channels, std::size_t height, std::size_t width, T* cols) {
  const std::size_t plane = height * width;
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
      for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
        T* dst = cols + (c * 9 + static_cast<std::size_t>(ky * 3 + kx)) * plane;
        const std::ptrdiff_t dy = ky - 1;
        const std::ptrdiff_t dx = kx - 1;
        const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, -dx);
        const std::ptrdiff_t x1 = std::min<std::ptrdiff_t>(w, w - dx);
        for (std::ptrdiff_t y = 0; y < h; ++y) {
          T* row = dst + y * w;
          const std::ptrdiff_t sy = y + dy;
          if (sy < 0 || sy >= h) {
            std::fill(row, row + w, T{0});
            continue;
          }
          const T* src = in + (static_cast<std::ptrdiff_t>(c) * h + sy) * w;
          std::fill(row, row + x0, T{0});
          std::copy(src + x0 + dx, src + x1 + dx, row + x0);
          std::fill(row + x1, row + w, T{0});
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* cols, std::size_t channels, std::size_t height, std::size_t width, T* out) {
  const std::size_t plane = height * width;
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  std::fill(out, out + channels * plane, T{0});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
      for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
        const T* src = cols + (c * 9 + static_cast<std::size_t>(ky * 3 + kx)) * plane;
        const std::ptrdiff_t dy = ky - 1;
        const std::ptrdiff_t dx = kx - 1;
        const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, -dx);
        const std::ptrdiff_t x1 = std::min<std::ptrdiff_t>(w, w - dx);
        for (std::ptrdiff_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = y + dy;
          if (sy < 0 || sy >= h) continue;
          const T* row = src + y * w;
          T* dst = out + (static_cast<std::ptrdiff_t>(c) * h + sy) * w;
          for (std::ptrdiff_t x = x0; x < x1; ++x) dst[x + dx] += row[x];
        }
      }
    }
  }
}

template <typename T>
void check_conv_shapes(const BasicTensor<T>& input, const BasicTensor<T>& kernels) {
  require(input.rank() == 3, "conv2d input must be (C,H,W), got " + shape_string(input.shape()));
  require(kernels.rank() == 4 && kernels.dim(2) == 3 && kernels.dim(3) == 3,
          "conv2d kernels must be (C_out,C_in,3,3), got " + shape_string(kernels.shape()));
  require(kernels.dim(1) == input.dim(0),
          "conv2d channel mismatch: input has " + std::to_string(input.dim(0)) +
              " channels, kernels expect " + std::to_string(kernels.dim(1)));
}

}  // namespace

// ---------------------------------------------------------------------------

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                      const BasicTensor<T>& bias) {
  check_conv_shapes(input, kernels);
  const std::size_t c_in = input.dim(0);
  const std::size_t h = input.dim(1);
  const std::size_t w = input.dim(2);
  const std::size_t c_out = kernels.dim(0);
  require(bias.size() == c_out, "conv2d bias length must equal output channels");

  BasicTensor<T> cols({c_in * 9, h * w});
  im2col(input.data(), c_in, h, w, cols.data());
  BasicTensor<T> out({c_out, h, w});
  auto o = as_matrix(out, c_out, h * w);
  o.noalias() = as_matrix(kernels, c_out, c_in * 9) * as_matrix(cols, c_in * 9, h * w);
  for (std::size_t k = 0; k < c_out; ++k) o.row(static_cast<Eigen::Index>(k)).array() += bias[k];
  return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                               const BasicTensor<T>& grad_output) {
  check_conv_shapes(input, kernels);
  const std::size_t c_in = input.dim(0);
  const std::size_t h = input.dim(1);
  const std::size_t w = input.dim(2);
  const std::size_t c_out = kernels.dim(0);
  require(grad_output.shape() == Shape({c_out, h, w}), "conv2d gradient shape mismatch");

  BasicTensor<T> cols({c_in * 9, h * w});
  im2col(input.data(), c_in, h, w, cols.data());
  const auto g = as_matrix(grad_output, c_out, h * w);

  Conv2dGrads<T> grads;
  grads.kernels = BasicTensor<T>(kernels.shape());
  as_matrix(grads.kernels, c_out, c_in * 9).noalias() = g * as_matrix(cols, c_in * 9, h * w).transpose();
  grads.bias = BasicTensor<T>({c_out});
  // Plain loop: Eigen's vectorized reductions peel by address, which makes
  // the rounding depend on where the buffer happens to land.
  for (std::size_t k = 0; k < c_out; ++k) {
    const T* row = grad_output.data() + k * h * w;
    T acc{0};
    for (std::size_t i = 0; i < h * w; ++i) acc += row[i];
    grads.bias[k] = acc;
  }

  BasicTensor<T> grad_cols({c_in * 9, h * w});
  as_matrix(grad_cols, c_in * 9, h * w).noalias() =
      as_matrix(kernels, c_out, c_in * 9).transpose() * g;
  grads.input = BasicTensor<T>(input.shape());
  col2im(grad_cols.data(), c_in, h, w, grads.input.data());
  return grads;
}

// ---------------------------------------------------------------------------

template <typename T>
BasicTensor<T> activate(const BasicTensor<T>& x, Activation act) {
  BasicTensor<T> y = x;
  if (act == Activation::kElu) {
    for (T& v : y.values()) v = v > T{0} ? v : std::expm1(v);
  }
  return y;
}

template <typename T>
void activation_backward(const BasicTensor<T>& output, Activation act, BasicTensor<T>& grad) {
  require(output.size() == grad.size(), "activation gradient shape mismatch");
  if (act == Activation::kLinear) return;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const T y = output[i];
    grad[i] *= y > T{0} ? T{1} : y + T{1};
  }
}

// ---------------------------------------------------------------------------

template <typename T>
MaxPoolResult<T> maxpool2d(const BasicTensor<T>& input, PoolKernel kernel) {
  require(input.rank() == 3, "maxpool2d input must be (C,H,W)");
  if (kernel.rows < 1 || kernel.cols < 1) fail(ErrorCode::kConfig, "pool kernel must be >= 1");
  const std::size_t c = input.dim(0);
  const std::size_t h = input.dim(1);
  const std::size_t w = input.dim(2);
  const auto kh = static_cast<std::size_t>(kernel.rows);
  const auto kw = static_cast<std::size_t>(kernel.cols);
  const std::size_t oh = ceil_div(h, kh);
  const std::size_t ow = ceil_div(w, kw);

  MaxPoolResult<T> r;
  r.input_shape = input.shape();
  r.output = BasicTensor<T>({c, oh, ow});
  r.argmax.resize(c * oh * ow);
  std::size_t o = 0;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const std::size_t y1 = std::min(h, oy * kh + kh);
      for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
        const std::size_t x1 = std::min(w, ox * kw + kw);
        std::size_t best = (ch * h + oy * kh) * w + ox * kw;
        T best_v = input[best];
        for (std::size_t y = oy * kh; y < y1; ++y) {
          for (std::size_t x = ox * kw; x < x1; ++x) {
            const std::size_t idx = (ch * h + y) * w + x;
            if (input[idx] > best_v) {
              best_v = input[idx];
              best = idx;
            }
          }
        }
        r.output[o] = best_v;
        r.argmax[o] = best;
      }
    }
  }
  return r;
}

template <typename T>
BasicTensor<T> maxpool2d_backward(const MaxPoolResult<T>& pooled, const BasicTensor<T>& grad_output) {
  require(grad_output.size() == pooled.argmax.size(), "maxpool2d gradient shape mismatch");
  BasicTensor<T> grad(pooled.input_shape);
  for (std::size_t i = 0; i < pooled.argmax.size(); ++i) grad[pooled.argmax[i]] += grad_output[i];
  return grad;
}

// ---------------------------------------------------------------------------

template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double p, bool training, Rng* rng) {
  if (!(p >= 0.0 && p < 1.0)) fail(ErrorCode::kConfig, "dropout probability must be in [0, 1)");
  DropoutResult<T> r;
  r.output = input;
  if (!training || p == 0.0) return r;
  if (rng == nullptr) fail(ErrorCode::kState, "training-mode dropout needs a generator");
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  r.mask.resize(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    r.mask[i] = rng->uniform() < p ? T{0} : keep_scale;
    r.output[i] *= r.mask[i];
  }
  return r;
}

template <typename T>
BasicTensor<T> dropout_backward(const std::vector<T>& mask, const BasicTensor<T>& grad_output) {
  BasicTensor<T> grad = grad_output;
  if (mask.empty()) return grad;
  require(mask.size() == grad.size(), "dropout gradient shape mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
  return grad;
}

// ---------------------------------------------------------------------------

template <typename T>
BasicTensor<T> RecurrentTrace<T>::outputs() const {
  const std::size_t steps_n = steps();
  const std::size_t h = hidden.dim(1);
  BasicTensor<T> out({steps_n, h});
  std::copy(hidden.data() + h, hidden.data() + (steps_n + 1) * h, out.data());
  return out;
}

namespace {

template <typename T>
void check_recurrent(const BasicTensor<T>& inputs, const RecurrentParams<T>& params, int gates,
                     const BasicTensor<T>& h0) {
  require(inputs.rank() == 2, "recurrent input must be (T,F), got " + shape_string(inputs.shape()));
  require(params.recurrent_kernel.rank() == 2, "recurrent kernel must be (H, G*H)");
  const std::size_t h = params.recurrent_kernel.dim(0);
  const std::size_t f = inputs.dim(1);
  const std::size_t g = static_cast<std::size_t>(gates) * h;
  require(params.recurrent_kernel.dim(1) == g, "recurrent kernel must be (H, G*H)");
  require(params.input_kernel.shape() == Shape({f, g}),
          "input kernel " + shape_string(params.input_kernel.shape()) + " does not match input width " +
              std::to_string(f) + " and hidden size " + std::to_string(h));
  require(params.bias.size() == g, "recurrent bias must have G*H entries");
  require(h0.size() == h, "initial state length must equal hidden size");
}

// (T, G*H) = X W + b
template <typename T>
RowMat<T> input_projection(const BasicTensor<T>& inputs, const RecurrentParams<T>& params) {
  const std::size_t steps = inputs.dim(0);
  const std::size_t f = inputs.dim(1);
  const std::size_t g = params.bias.size();
  RowMat<T> xp = as_matrix(inputs, steps, f) * as_matrix(params.input_kernel, f, g);
  xp.rowwise() += ConstVecMap<T>(params.bias.data(), static_cast<Eigen::Index>(g));
  return xp;
}

}  // namespace

template <typename T>
RecurrentTrace<T> gru_forward(const BasicTensor<T>& inputs, const RecurrentParams<T>& params,
                              const BasicTensor<T>& h0) {
  check_recurrent(inputs, params, 3, h0);
  const auto steps = static_cast<Eigen::Index>(inputs.dim(0));
  const auto h = static_cast<Eigen::Index>(params.hidden_size());

  RecurrentTrace<T> tr;
  tr.kind = RnnKind::kGru;
  tr.inputs = inputs;
  tr.hidden = BasicTensor<T>({static_cast<std::size_t>(steps) + 1, static_cast<std::size_t>(h)});
  tr.gates = BasicTensor<T>({static_cast<std::size_t>(steps), static_cast<std::size_t>(3 * h)});
  std::copy(h0.data(), h0.data() + h, tr.hidden.data());

  const RowMat<T> xp = input_projection(inputs, params);
  const auto u = as_matrix(params.recurrent_kernel, static_cast<std::size_t>(h), static_cast<std::size_t>(3 * h));
  RowVec<T> zr(2 * h);
  RowVec<T> rh(h);
  RowVec<T> nn(h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    ConstVecMap<T> hp(tr.hidden.data() + t * h, h);
    VecMap<T> hn(tr.hidden.data() + (t + 1) * h, h);
    VecMap<T> gate(tr.gates.data() + t * 3 * h, 3 * h);
    zr.noalias() = hp * u.leftCols(2 * h);
    for (Eigen::Index j = 0; j < 2 * h; ++j) gate[j] = sigmoid(xp(t, j) + zr[j]);
    rh = gate.segment(h, h).cwiseProduct(hp);
    nn.noalias() = rh * u.rightCols(h);
    for (Eigen::Index j = 0; j < h; ++j) {
      const T n = std::tanh(xp(t, 2 * h + j) + nn[j]);
      const T z = gate[j];
      gate[2 * h + j] = n;
      hn[j] = (T{1} - z) * hp[j] + z * n;
    }
  }
  return tr;
}

template <typename T>
RecurrentTrace<T> lstm_forward(const BasicTensor<T>& inputs, const RecurrentParams<T>& params,
                               const BasicTensor<T>& h0, const BasicTensor<T>& c0) {
  check_recurrent(inputs, params, 4, h0);
  require(c0.size() == h0.size(), "initial cell state length must equal hidden size");
  const auto steps = static_cast<Eigen::Index>(inputs.dim(0));
  const auto h = static_cast<Eigen::Index>(params.hidden_size());
  const auto hs = static_cast<std::size_t>(h);

  RecurrentTrace<T> tr;
  tr.kind = RnnKind::kLstm;
  tr.inputs = inputs;
  tr.hidden = BasicTensor<T>({static_cast<std::size_t>(steps) + 1, hs});
  tr.cell = BasicTensor<T>({static_cast<std::size_t>(steps) + 1, hs});
  tr.gates = BasicTensor<T>({static_cast<std::size_t>(steps), 4 * hs});
  std::copy(h0.data(), h0.data() + h, tr.hidden.data());
  std::copy(c0.data(), c0.data() + h, tr.cell.data());

  const RowMat<T> xp = input_projection(inputs, params);
  const auto u = as_matrix(params.recurrent_kernel, hs, 4 * hs);
  RowVec<T> pre(4 * h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    ConstVecMap<T> hp(tr.hidden.data() + t * h, h);
    ConstVecMap<T> cp(tr.cell.data() + t * h, h);
    VecMap<T> hn(tr.hidden.data() + (t + 1) * h, h);
    VecMap<T> cn(tr.cell.data() + (t + 1) * h, h);
    VecMap<T> gate(tr.gates.data() + t * 4 * h, 4 * h);
    pre.noalias() = hp * u;
    pre += xp.row(t);
    for (Eigen::Index j = 0; j < h; ++j) {
      const T i = sigmoid(pre[j]);
      const T f = sigmoid(pre[h + j]);
      const T g = std::tanh(pre[2 * h + j]);
      const T o = sigmoid(pre[3 * h + j]);
      gate[j] = i;
      gate[h + j] = f;
      gate[2 * h + j] = g;
      gate[3 * h + j] = o;
      cn[j] = f * cp[j] + i * g;
      hn[j] = o * std::tanh(cn[j]);
    }
  }
  return tr;
}

template <typename T>
RecurrentGrads<T> recurrent_backward(const RecurrentTrace<T>& trace, const RecurrentParams<T>& params,
                                     const BasicTensor<T>& grad_outputs) {
  const int gates = gate_count(trace.kind);
  const auto steps = static_cast<Eigen::Index>(trace.steps());
  const auto h = static_cast<Eigen::Index>(params.hidden_size());
  const auto hs = static_cast<std::size_t>(h);
  const std::size_t f = params.input_size();
  const auto gh = static_cast<Eigen::Index>(gates) * h;
  require(grad_outputs.shape() == Shape({static_cast<std::size_t>(steps), hs}),
          "recurrent output gradient must be (T,H)");

  RecurrentGrads<T> grads;
  grads.params.recurrent_kernel = BasicTensor<T>(params.recurrent_kernel.shape());
  auto gu = as_matrix(grads.params.recurrent_kernel, hs, static_cast<std::size_t>(gh));
  const auto u = as_matrix(params.recurrent_kernel, hs, static_cast<std::size_t>(gh));
  RowMat<T> da = RowMat<T>::Zero(steps, gh);  // pre-activation gradients

  RowVec<T> dh = RowVec<T>::Zero(h);
  RowVec<T> dc = RowVec<T>::Zero(h);
  RowVec<T> dh_prev(h);
  RowVec<T> drh(h);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    dh += ConstVecMap<T>(grad_outputs.data() + t * h, h);
    ConstVecMap<T> hp(trace.hidden.data() + t * h, h);
    ConstVecMap<T> gate(trace.gates.data() + t * gh, gh);
    auto a = da.row(t);
    if (trace.kind == RnnKind::kGru) {
      for (Eigen::Index j = 0; j < h; ++j) {
        const T z = gate[j];
        const T n = gate[2 * h + j];
        a[j] = dh[j] * (n - hp[j]) * z * (T{1} - z);
        a[2 * h + j] = dh[j] * z * (T{1} - n * n);
        dh_prev[j] = dh[j] * (T{1} - z);
      }
      const RowVec<T> rh = gate.segment(h, h).cwiseProduct(hp);
      gu.rightCols(h).noalias() += rh.transpose() * a.segment(2 * h, h);
      drh.noalias() = a.segment(2 * h, h) * u.rightCols(h).transpose();
      for (Eigen::Index j = 0; j < h; ++j) {
        const T r = gate[h + j];
        a[h + j] = drh[j] * hp[j] * r * (T{1} - r);
        dh_prev[j] += drh[j] * r;
      }
      gu.leftCols(2 * h).noalias() += hp.transpose() * a.segment(0, 2 * h);
      dh_prev.noalias() += a.segment(0, 2 * h) * u.leftCols(2 * h).transpose();
    } else {
      ConstVecMap<T> c(trace.cell.data() + (t + 1) * h, h);
      ConstVecMap<T> cp(trace.cell.data() + t * h, h);
      for (Eigen::Index j = 0; j < h; ++j) {
        const T i = gate[j];
        const T fg = gate[h + j];
        const T g = gate[2 * h + j];
        const T o = gate[3 * h + j];
        const T tc = std::tanh(c[j]);
        dc[j] += dh[j] * o * (T{1} - tc * tc);
        a[j] = dc[j] * g * i * (T{1} - i);
        a[h + j] = dc[j] * cp[j] * fg * (T{1} - fg);
        a[2 * h + j] = dc[j] * i * (T{1} - g * g);
        a[3 * h + j] = dh[j] * tc * o * (T{1} - o);
        dc[j] *= fg;
      }
      gu.noalias() += hp.transpose() * a;
      dh_prev.noalias() = a * u.transpose();
    }
    dh = dh_prev;
  }

  grads.params.input_kernel = BasicTensor<T>(params.input_kernel.shape());
  as_matrix(grads.params.input_kernel, f, static_cast<std::size_t>(gh)).noalias() =
      as_matrix(trace.inputs, static_cast<std::size_t>(steps), f).transpose() * da;
  grads.params.bias = BasicTensor<T>(params.bias.shape());
  for (Eigen::Index t = 0; t < steps; ++t) {
    for (Eigen::Index j = 0; j < gh; ++j) grads.params.bias[static_cast<std::size_t>(j)] += da(t, j);
  }
  grads.inputs = BasicTensor<T>(trace.inputs.shape());
  as_matrix(grads.inputs, static_cast<std::size_t>(steps), f).noalias() =
      da * as_matrix(params.input_kernel, f, static_cast<std::size_t>(gh)).transpose();
  grads.h0 = BasicTensor<T>({hs});
  VecMap<T>(grads.h0.data(), h) = dh;
  if (trace.kind == RnnKind::kLstm) {
    grads.c0 = BasicTensor<T>({hs});
    VecMap<T>(grads.c0.data(), h) = dc;
  }
  return grads;
}

// ---------------------------------------------------------------------------

template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                     const BasicTensor<T>& bias) {
  require(weights.rank() == 2 && weights.dim(0) == input.size(),
          "dense weights must be (H,K) with H = input length");
  const std::size_t k = weights.dim(1);
  require(bias.size() == k, "dense bias must have K entries");
  BasicTensor<T> logits({k});
  VecMap<T>(logits.data(), static_cast<Eigen::Index>(k)).noalias() =
      ConstVecMap<T>(input.data(), static_cast<Eigen::Index>(input.size())) *
          as_matrix(weights, input.size(), k) +
      ConstVecMap<T>(bias.data(), static_cast<Eigen::Index>(k));
  return logits;
}

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits) {
  if (logits.size() < 2) fail(ErrorCode::kShape, "softmax needs at least two classes");
  if (!logits.all_finite()) fail(ErrorCode::kNumeric, "non-finite logits");
  const T mx = *std::max_element(logits.storage().begin(), logits.storage().end());
  BasicTensor<T> p(logits.shape());
  T sum{0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (T& v : p.values()) v = std::max(v / sum, std::numeric_limits<T>::min());
  return p;
}

template <typename T>
T cross_entropy(const BasicTensor<T>& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    fail(ErrorCode::kLabel, "label " + std::to_string(label) + " out of range for " +
                                std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], static_cast<T>(kProbabilityFloor)));
}

template <typename T>
T mean_cross_entropy(std::span<const BasicTensor<T>> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) fail(ErrorCode::kInput, "probability/label count mismatch");
  if (probs.empty()) return T{0};
  T total{0};
  for (std::size_t i = 0; i < probs.size(); ++i) total += cross_entropy(probs[i], labels[i]);
  return total / static_cast<T>(probs.size());
}

template <typename T>
BasicTensor<T> softmax_cross_entropy_grad(const BasicTensor<T>& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    fail(ErrorCode::kLabel, "label " + std::to_string(label) + " out of range");
  }
  BasicTensor<T> g = probs;
  g[static_cast<std::size_t>(label)] -= T{1};
  return g;
}

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& grad_logits) {
  const std::size_t h = input.size();
  const std::size_t k = grad_logits.size();
  require(weights.shape() == Shape({h, k}), "dense gradient shape mismatch");
  const ConstVecMap<T> x(input.data(), static_cast<Eigen::Index>(h));
  const ConstVecMap<T> g(grad_logits.data(), static_cast<Eigen::Index>(k));
  DenseGrads<T> d;
  d.weights = BasicTensor<T>(weights.shape());
  as_matrix(d.weights, h, k).noalias() = x.transpose() * g;
  d.bias = grad_logits;
  d.input = BasicTensor<T>(input.shape());
  VecMap<T>(d.input.data(), static_cast<Eigen::Index>(h)).noalias() =
      g * as_matrix(weights, h, k).transpose();
  return d;
}

// ---------------------------------------------------------------------------

#define CALLSEG_INSTANTIATE_LAYERS(T)                                                          \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&,                 \
                                 const BasicTensor<T>&);                                       \
  template Conv2dGrads<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                          const BasicTensor<T>&);                              \
  template BasicTensor<T> activate(const BasicTensor<T>&, Activation);                         \
  template void activation_backward(const BasicTensor<T>&, Activation, BasicTensor<T>&);       \
  template MaxPoolResult<T> maxpool2d(const BasicTensor<T>&, PoolKernel);                      \
  template BasicTensor<T> maxpool2d_backward(const MaxPoolResult<T>&, const BasicTensor<T>&);  \
  template DropoutResult<T> dropout(const BasicTensor<T>&, double, bool, Rng*);                \
  template BasicTensor<T> dropout_backward(const std::vector<T>&, const BasicTensor<T>&);      \
  template struct RecurrentTrace<T>;                                                           \
  template RecurrentTrace<T> gru_forward(const BasicTensor<T>&, const RecurrentParams<T>&,     \
                                         const BasicTensor<T>&);                               \
  template RecurrentTrace<T> lstm_forward(const BasicTensor<T>&, const RecurrentParams<T>&,    \
                                          const BasicTensor<T>&, const BasicTensor<T>&);       \
  template RecurrentGrads<T> recurrent_backward(const RecurrentTrace<T>&,                      \
                                                const RecurrentParams<T>&,                     \
                                                const BasicTensor<T>&);                        \
  template BasicTensor<T> dense(const BasicTensor<T>&, const BasicTensor<T>&,                  \
                                const BasicTensor<T>&);                                        \
  template BasicTensor<T> softmax(const BasicTensor<T>&);                                      \
  template T cross_entropy(const BasicTensor<T>&, int);                                        \
  template T mean_cross_entropy(std::span<const BasicTensor<T>>, std::span<const int>);        \
  template BasicTensor<T> softmax_cross_entropy_grad(const BasicTensor<T>&, int);              \
  template DenseGrads<T> dense_backward(const BasicTensor<T>&, const BasicTensor<T>&,          \
                                        const BasicTensor<T>&);

CALLSEG_INSTANTIATE_LAYERS(float)
CALLSEG_INSTANTIATE_LAYERS(double)

#undef CALLSEG_INSTANTIATE_LAYERS

}  // namespace callseg
