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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "callseg/labels.hpp"
#include "callseg/layers.hpp"
#include "callseg/mel.hpp"
#include "callseg/rng.hpp"
#include "callseg/tensor.hpp"

namespace callseg {

inline constexpr int kConvBlocks = 4;
inline constexpr int kRnnLayers = 2;

struct ModelConfig {
  std::array<int, kConvBlocks> conv_filters{64, 64, 64, 32};
  std::array<PoolKernel, kConvBlocks> pool_kernels{{{2, 2}, {3, 3}, {4, 2}, {4, 2}}};
  double dropout_p = 0.1;
  RnnKind rnn_kind = RnnKind::kGru;
  std::array<int, kRnnLayers> rnn_hidden{84, 84};
  int n_classes = 2;
  int input_height = 96;
  int input_frames = 1000;
  Activation conv_activation = Activation::kElu;

  // Throws kConfig; in particular when the pools do not collapse the
  // frequency axis to 1.
  void validate() const;

  struct StackShape {
    std::size_t channels;
    std::size_t height;
    std::size_t frames;
  };
  // Shape after block `block` (0-based), i.e. after its pool.
  StackShape block_output(int block) const;
  StackShape conv_output() const { return block_output(kConvBlocks - 1); }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

std::string_view to_string(RnnKind kind);
RnnKind parse_rnn_kind(std::string_view s);  // "gru" | "lstm", throws kConfig

// Total scalar parameters implied by a configuration.
std::size_t count_params(const ModelConfig& config);

// Per-sample forward caches.
template <typename T>
struct CrnnTrace {
  std::array<BasicTensor<T>, kConvBlocks> conv_input;
  std::array<BasicTensor<T>, kConvBlocks> activation;
  std::array<MaxPoolResult<T>, kConvBlocks> pool;
  std::array<std::vector<T>, kConvBlocks> dropout_mask;
  BasicTensor<T> conv_features;  // (C, 1, T') output of the conv stack
  BasicTensor<T> sequence;       // (T', C) presented to the first RNN layer
  RecurrentTrace<T> rnn[kRnnLayers];
  BasicTensor<T> last_hidden;  // (H2)
  BasicTensor<T> probs;        // (K)
};

// The convolutional-recurrent classifier: [conv -> act -> pool -> dropout] x 4,
// reshape to (time, channels), RNN (full sequence), RNN (last state), dense
// softmax.
template <typename T>
class BasicCrnn {
 public:
  BasicCrnn(ModelConfig config, std::vector<BasicTensor<T>> parameters,
            FeatureNormalization normalization = {});

  const ModelConfig& config() const { return config_; }
  const LabelConvention& labels() const { return labels_; }
  const FeatureNormalization& normalization() const { return normalization_; }
  void set_normalization(const FeatureNormalization& n) { normalization_ = n; }

  std::span<BasicTensor<T>> parameters() { return params_; }
  std::span<const BasicTensor<T>> parameters() const { return params_; }
  static std::vector<std::string> parameter_names(const ModelConfig& config);
  std::vector<std::string> parameter_names() const { return parameter_names(config_); }
  std::size_t parameter_count() const;

  // Normalizes and reshapes features to (1, n_mels, frames); throws kShape.
  BasicTensor<T> prepare_input(const MelSpectrogram& features) const;

  CrnnTrace<T> forward_trace(const BasicTensor<T>& input, bool training, Rng* rng) const;
  // Gradients of cross_entropy(probs, label), one tensor per parameter.
  std::vector<BasicTensor<T>> backward_trace(const CrnnTrace<T>& trace, int label) const;

  BasicTensor<T> predict(const MelSpectrogram& features) const;
  BasicTensor<T> predict_input(const BasicTensor<T>& input) const;

  // Stateful pair: forward() caches its trace for the following backward().
  BasicTensor<T> forward(const BasicTensor<T>& input, bool training, Rng* rng);
  std::vector<BasicTensor<T>> backward(int label);  // kState without forward

  template <typename U>
  BasicCrnn<U> cast() const {
    std::vector<BasicTensor<U>> p;
    p.reserve(params_.size());
    for (const auto& t : params_) p.push_back(t.template cast<U>());
    return BasicCrnn<U>(config_, std::move(p), normalization_);
  }

 private:
  const BasicTensor<T>& param(std::size_t i) const { return params_[i]; }
  RecurrentParams<T> rnn_params(int layer) const;

  ModelConfig config_;
  LabelConvention labels_;
  FeatureNormalization normalization_;
  std::vector<BasicTensor<T>> params_;
  std::optional<CrnnTrace<T>> last_trace_;
};

using CrnnModel = BasicCrnn<float>;
using CrnnModel64 = BasicCrnn<double>;

// Glorot-uniform conv, input and dense kernels; orthogonal recurrent kernels;
// zero biases. Deterministic in the seed.
template <typename T = float>
BasicCrnn<T> build_crnn(const ModelConfig& config, std::uint64_t seed);

}  // namespace callseg
