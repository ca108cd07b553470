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

#include "callseg/audio.hpp"

namespace callseg {

struct MelConfig {
  int sample_rate = kDefaultSampleRate;
  int window = 200;  // samples
  int hop = 80;      // samples
  int n_fft = 256;
  int n_mels = 96;
  double log_floor = 1e-10;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters, linearly spaced on the mel scale between fmin = 0 and
// fmax = Nyquist, peak weight 1. Row-major (n_mels x n_fft/2+1).
struct MelFilterbank {
  int n_mels = 0;
  int n_bins = 0;
  double fmin = 0.0;
  double fmax = 0.0;
  std::vector<double> center_hz;  // one per filter
  std::vector<double> weights;

  double weight(int mel, int bin) const {
    return weights[static_cast<std::size_t>(mel) * n_bins + bin];
  }
};

MelFilterbank mel_filterbank(int n_mels = 96, int sample_rate = kDefaultSampleRate,
                             int n_fft = 256, int window = 200);

// Log-amplitude mel energies, row-major (n_mels rows x n_frames columns).
struct MelSpectrogram {
  int n_mels = 0;
  int n_frames = 0;
  int window = 0;
  int hop = 0;
  std::vector<float> values;

  float at(int mel, int frame) const {
    return values[static_cast<std::size_t>(mel) * n_frames + frame];
  }
};

// Frames produced for a signal of n samples: the signal is reflect-padded by
// window/2 on both sides and framed at the hop; the final centered frame is
// dropped, so n = 80000, hop = 80 gives exactly 1000 frames.
int frame_count(std::size_t n_samples, int window, int hop);

MelSpectrogram log_mel_spectrogram(const AudioBuffer& buffer, const MelConfig& config = {});

// Global z-score applied to raw log-mel values. Disabled stats mean identity.
struct FeatureNormalization {
  bool enabled = false;
  double mean = 0.0;
  double stddev = 1.0;

  void apply(std::span<float> values) const;
};

// Single-pass accumulator (Welford) over any number of feature arrays.
class NormalizationAccumulator {
 public:
  void add(std::span<const float> values);
  FeatureNormalization finish() const;
  std::size_t count() const { return count_; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace callseg
