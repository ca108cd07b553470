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

#include "callseg/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "callseg/error.hpp"

namespace callseg {

namespace {

// Parameter layout: conv{b}.kernel, conv{b}.bias for each block, then
// rnn{l}.input_kernel / recurrent_kernel / bias per layer, then dense.
constexpr std::size_t kConvParam = 0;
constexpr std::size_t kRnnParam = 2 * kConvBlocks;
constexpr std::size_t kDenseParam = kRnnParam + 3 * kRnnLayers;
constexpr std::size_t kParamCount = kDenseParam + 2;

std::size_t rnn_input_size(const ModelConfig& c, int layer) {
  return layer == 0 ? static_cast<std::size_t>(c.conv_filters[kConvBlocks - 1])
                    : static_cast<std::size_t>(c.rnn_hidden[layer - 1]);
}

std::vector<Shape> parameter_shapes(const ModelConfig& c) {
  std::vector<Shape> shapes;
  std::size_t in_ch = 1;
  for (int b = 0; b < kConvBlocks; ++b) {
    const auto out_ch = static_cast<std::size_t>(c.conv_filters[b]);
    shapes.push_back({out_ch, in_ch, 3, 3});
    shapes.push_back({out_ch});
    in_ch = out_ch;
  }
  const auto g = static_cast<std::size_t>(gate_count(c.rnn_kind));
  for (int l = 0; l < kRnnLayers; ++l) {
    const auto h = static_cast<std::size_t>(c.rnn_hidden[l]);
    shapes.push_back({rnn_input_size(c, l), g * h});
    shapes.push_back({h, g * h});
    shapes.push_back({g * h});
  }
  const auto h2 = static_cast<std::size_t>(c.rnn_hidden[kRnnLayers - 1]);
  shapes.push_back({h2, static_cast<std::size_t>(c.n_classes)});
  shapes.push_back({static_cast<std::size_t>(c.n_classes)});
  return shapes;
}

template <typename T>
void glorot_uniform(BasicTensor<T>& t, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (T& v : t.values()) v = static_cast<T>(rng.uniform(-limit, limit));
}

// Rows of the (H, G*H) result are orthonormal.
template <typename T>
void orthogonal(BasicTensor<T>& t, Rng& rng) {
  const auto rows = static_cast<Eigen::Index>(t.dim(0));
  const auto cols = static_cast<Eigen::Index>(t.dim(1));
  const Eigen::Index tall = std::max(rows, cols);
  const Eigen::Index narrow = std::min(rows, cols);
  Eigen::MatrixXd a(tall, narrow);
  for (Eigen::Index i = 0; i < tall; ++i) {
    for (Eigen::Index j = 0; j < narrow; ++j) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, narrow);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(narrow).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < narrow; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  const Eigen::MatrixXd m = rows < cols ? Eigen::MatrixXd(q.transpose()) : q;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) t.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = static_cast<T>(m(i, j));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void ModelConfig::validate() const {
  for (int b = 0; b < kConvBlocks; ++b) {
    if (conv_filters[b] < 1) fail(ErrorCode::kConfig, "conv filter counts must be >= 1");
    if (pool_kernels[b].rows < 1 || pool_kernels[b].cols < 1) {
      fail(ErrorCode::kConfig, "pool kernels must be >= 1 on both axes");
    }
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail(ErrorCode::kConfig, "dropout_p must be in [0, 1)");
  for (int h : rnn_hidden) {
    if (h < 1) fail(ErrorCode::kConfig, "recurrent hidden sizes must be >= 1");
  }
  if (n_classes != 2 && n_classes != 4) {
    fail(ErrorCode::kConfig, "n_classes must be 2 or 4, got " + std::to_string(n_classes));
  }
  if (input_height < 1 || input_frames < 1) fail(ErrorCode::kConfig, "input shape must be positive");
  const StackShape out = conv_output();
  if (out.height != 1) {
    fail(ErrorCode::kConfig, "pool kernels reduce an input height of " + std::to_string(input_height) +
                                 " to " + std::to_string(out.height) + ", not 1");
  }
}

ModelConfig::StackShape ModelConfig::block_output(int block) const {
  auto h = static_cast<std::size_t>(input_height);
  auto w = static_cast<std::size_t>(input_frames);
  for (int b = 0; b <= block; ++b) {
    h = ceil_div(h, static_cast<std::size_t>(pool_kernels[b].rows));
    w = ceil_div(w, static_cast<std::size_t>(pool_kernels[b].cols));
  }
  return {static_cast<std::size_t>(conv_filters[block]), h, w};
}

std::string_view to_string(RnnKind kind) { return kind == RnnKind::kGru ? "gru" : "lstm"; }

RnnKind parse_rnn_kind(std::string_view s) {
  if (s == "gru" || s == "GRU") return RnnKind::kGru;
  if (s == "lstm" || s == "LSTM") return RnnKind::kLstm;
  fail(ErrorCode::kConfig, "rnn kind must be gru or lstm, got '" + std::string(s) + "'");
}

std::size_t count_params(const ModelConfig& config) {
  std::size_t n = 0;
  for (const Shape& s : parameter_shapes(config)) n += shape_size(s);
  return n;
}

// ---------------------------------------------------------------------------

template <typename T>
BasicCrnn<T>::BasicCrnn(ModelConfig config, std::vector<BasicTensor<T>> parameters,
                        FeatureNormalization normalization)
    : config_(config),
      labels_(LabelConvention::for_classes(config.n_classes)),
      normalization_(normalization),
      params_(std::move(parameters)) {
  config_.validate();
  const auto shapes = parameter_shapes(config_);
  if (params_.size() != shapes.size()) fail(ErrorCode::kShape, "wrong number of parameter tensors");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (params_[i].shape() != shapes[i]) {
      fail(ErrorCode::kShape, "parameter " + std::to_string(i) + " has shape " +
                                  shape_string(params_[i].shape()) + ", expected " +
                                  shape_string(shapes[i]));
    }
  }
}

template <typename T>
std::vector<std::string> BasicCrnn<T>::parameter_names(const ModelConfig&) {
  std::vector<std::string> names;
  for (int b = 0; b < kConvBlocks; ++b) {
    names.push_back("conv" + std::to_string(b) + ".kernel");
    names.push_back("conv" + std::to_string(b) + ".bias");
  }
  for (int l = 0; l < kRnnLayers; ++l) {
    names.push_back("rnn" + std::to_string(l) + ".input_kernel");
    names.push_back("rnn" + std::to_string(l) + ".recurrent_kernel");
    names.push_back("rnn" + std::to_string(l) + ".bias");
  }
  names.push_back("dense.kernel");
  names.push_back("dense.bias");
  return names;
}

template <typename T>
std::size_t BasicCrnn<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

template <typename T>
RecurrentParams<T> BasicCrnn<T>::rnn_params(int layer) const {
  const std::size_t base = kRnnParam + 3 * static_cast<std::size_t>(layer);
  return {params_[base], params_[base + 1], params_[base + 2]};
}

template <typename T>
BasicTensor<T> BasicCrnn<T>::prepare_input(const MelSpectrogram& features) const {
  if (features.n_mels != config_.input_height || features.n_frames != config_.input_frames) {
    fail(ErrorCode::kShape, "features are (" + std::to_string(features.n_mels) + "," +
                                std::to_string(features.n_frames) + "), model expects (" +
                                std::to_string(config_.input_height) + "," +
                                std::to_string(config_.input_frames) + ")");
  }
  std::vector<float> v = features.values;
  normalization_.apply(v);
  return BasicTensor<T>({1, static_cast<std::size_t>(features.n_mels), static_cast<std::size_t>(features.n_frames)},
                        std::vector<T>(v.begin(), v.end()));
}

template <typename T>
CrnnTrace<T> BasicCrnn<T>::forward_trace(const BasicTensor<T>& input, bool training, Rng* rng) const {
  const Shape expected{1, static_cast<std::size_t>(config_.input_height),
                       static_cast<std::size_t>(config_.input_frames)};
  if (input.shape() != expected) {
    fail(ErrorCode::kShape, "model input must be " + shape_string(expected) + ", got " +
                                shape_string(input.shape()));
  }
  CrnnTrace<T> tr;
  BasicTensor<T> x = input;
  for (int b = 0; b < kConvBlocks; ++b) {
    const std::size_t k = kConvParam + 2 * static_cast<std::size_t>(b);
    tr.conv_input[b] = std::move(x);
    tr.activation[b] = activate(conv2d(tr.conv_input[b], params_[k], params_[k + 1]), config_.conv_activation);
    tr.pool[b] = maxpool2d(tr.activation[b], config_.pool_kernels[b]);
    auto dropped = dropout(tr.pool[b].output, config_.dropout_p, training, rng);
    tr.dropout_mask[b] = std::move(dropped.mask);
    x = std::move(dropped.output);
  }
  tr.conv_features = x;

  const std::size_t channels = x.dim(0);
  const std::size_t steps = x.dim(2);
  tr.sequence = BasicTensor<T>({steps, channels});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < steps; ++t) tr.sequence.at(t, c) = x[c * steps + t];
  }

  BasicTensor<T> seq = tr.sequence;
  for (int l = 0; l < kRnnLayers; ++l) {
    const RecurrentParams<T> p = rnn_params(l);
    const BasicTensor<T> zeros({p.hidden_size()});
    tr.rnn[l] = config_.rnn_kind == RnnKind::kGru ? gru_forward(seq, p, zeros)
                                                  : lstm_forward(seq, p, zeros, zeros);
    seq = tr.rnn[l].outputs();
  }
  const std::size_t h2 = seq.dim(1);
  tr.last_hidden = BasicTensor<T>({h2});
  std::copy(seq.data() + (steps - 1) * h2, seq.data() + steps * h2, tr.last_hidden.data());
  tr.probs = dense_softmax(tr.last_hidden, params_[kDenseParam], params_[kDenseParam + 1]);
  return tr;
}

template <typename T>
std::vector<BasicTensor<T>> BasicCrnn<T>::backward_trace(const CrnnTrace<T>& tr, int label) const {
  std::vector<BasicTensor<T>> grads(kParamCount);

  const BasicTensor<T> g_logits = softmax_cross_entropy_grad(tr.probs, label);
  DenseGrads<T> dg = dense_backward(tr.last_hidden, params_[kDenseParam], g_logits);
  grads[kDenseParam] = std::move(dg.weights);
  grads[kDenseParam + 1] = std::move(dg.bias);

  const std::size_t steps = tr.sequence.dim(0);
  BasicTensor<T> g_seq({steps, dg.input.size()});
  std::copy(dg.input.data(), dg.input.data() + dg.input.size(), g_seq.data() + (steps - 1) * dg.input.size());
  for (int l = kRnnLayers - 1; l >= 0; --l) {
    RecurrentGrads<T> rg = recurrent_backward(tr.rnn[l], rnn_params(l), g_seq);
    const std::size_t base = kRnnParam + 3 * static_cast<std::size_t>(l);
    grads[base] = std::move(rg.params.input_kernel);
    grads[base + 1] = std::move(rg.params.recurrent_kernel);
    grads[base + 2] = std::move(rg.params.bias);
    g_seq = std::move(rg.inputs);
  }

  const std::size_t channels = tr.sequence.dim(1);
  BasicTensor<T> g(tr.conv_features.shape());
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < steps; ++t) g[c * steps + t] = g_seq.at(t, c);
  }
  for (int b = kConvBlocks - 1; b >= 0; --b) {
    const std::size_t k = kConvParam + 2 * static_cast<std::size_t>(b);
    g = maxpool2d_backward(tr.pool[b], dropout_backward(tr.dropout_mask[b], g));
    activation_backward(tr.activation[b], config_.conv_activation, g);
    Conv2dGrads<T> cg = conv2d_backward(tr.conv_input[b], params_[k], g);
    grads[k] = std::move(cg.kernels);
    grads[k + 1] = std::move(cg.bias);
    g = std::move(cg.input);
  }
  return grads;
}

template <typename T>
BasicTensor<T> BasicCrnn<T>::predict_input(const BasicTensor<T>& input) const {
  return forward_trace(input, false, nullptr).probs;
}

template <typename T>
BasicTensor<T> BasicCrnn<T>::predict(const MelSpectrogram& features) const {
  return predict_input(prepare_input(features));
}

template <typename T>
BasicTensor<T> BasicCrnn<T>::forward(const BasicTensor<T>& input, bool training, Rng* rng) {
  last_trace_ = forward_trace(input, training, rng);
  return last_trace_->probs;
}

template <typename T>
std::vector<BasicTensor<T>> BasicCrnn<T>::backward(int label) {
  if (!last_trace_) fail(ErrorCode::kState, "backward called without a preceding forward pass");
  return backward_trace(*last_trace_, label);
}

template <typename T>
BasicCrnn<T> build_crnn(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, 0x1417));
  std::vector<BasicTensor<T>> params;
  for (const Shape& s : parameter_shapes(config)) params.emplace_back(s);

  for (int b = 0; b < kConvBlocks; ++b) {
    BasicTensor<T>& k = params[kConvParam + 2 * static_cast<std::size_t>(b)];
    glorot_uniform(k, static_cast<double>(k.dim(1) * 9), static_cast<double>(k.dim(0) * 9), rng);
  }
  for (int l = 0; l < kRnnLayers; ++l) {
    const std::size_t base = kRnnParam + 3 * static_cast<std::size_t>(l);
    BasicTensor<T>& w = params[base];
    glorot_uniform(w, static_cast<double>(w.dim(0)), static_cast<double>(w.dim(1)), rng);
    orthogonal(params[base + 1], rng);
  }
  BasicTensor<T>& d = params[kDenseParam];
  glorot_uniform(d, static_cast<double>(d.dim(0)), static_cast<double>(d.dim(1)), rng);
  return BasicCrnn<T>(config, std::move(params));
}

template class BasicCrnn<float>;
template class BasicCrnn<double>;
template BasicCrnn<float> build_crnn<float>(const ModelConfig&, std::uint64_t);
template BasicCrnn<double> build_crnn<double>(const ModelConfig&, std::uint64_t);

}  // namespace callseg
