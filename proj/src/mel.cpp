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

#include "callseg/mel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "callseg/error.hpp"

namespace callseg {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_.get(), out_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  const fftw_complex* output() const { return out_.get(); }
  void execute() { fftw_execute(plan_); }
  int size() const { return n_; }

 private:
  int n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_{};
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(int n_mels, int sample_rate, int n_fft, int window) {
  if (n_mels < 1) fail(ErrorCode::kConfig, "n_mels must be >= 1");
  if (sample_rate <= 0) fail(ErrorCode::kConfig, "sample rate must be positive");
  if (!is_power_of_two(n_fft)) fail(ErrorCode::kConfig, "n_fft must be a power of two");
  if (n_fft < window) {
    fail(ErrorCode::kConfig, "n_fft " + std::to_string(n_fft) + " is shorter than the " +
                                 std::to_string(window) + "-sample window");
  }

  MelFilterbank bank;
  bank.n_mels = n_mels;
  bank.n_bins = n_fft / 2 + 1;
  bank.fmin = 0.0;
  bank.fmax = sample_rate / 2.0;
  bank.weights.assign(static_cast<std::size_t>(n_mels) * bank.n_bins, 0.0);

  const double mel_lo = hz_to_mel(bank.fmin);
  const double mel_hi = hz_to_mel(bank.fmax);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  const double bin_hz = static_cast<double>(sample_rate) / n_fft;

  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double center = edges[m + 1];
    const double hi = edges[m + 2];
    bank.center_hz.push_back(center);
    bool any = false;
    for (int k = 0; k < bank.n_bins; ++k) {
      const double f = k * bin_hz;
      const double w = std::max(0.0, std::min((f - lo) / (center - lo), (hi - f) / (hi - center)));
      bank.weights[static_cast<std::size_t>(m) * bank.n_bins + k] = w;
      any = any || w > 0.0;
    }
    // Filters narrower than the bin spacing can miss every bin center.
    if (!any) {
      const int nearest = std::clamp(static_cast<int>(std::lround(center / bin_hz)), 0,
                                     bank.n_bins - 1);
      bank.weights[static_cast<std::size_t>(m) * bank.n_bins + nearest] = 1.0;
    }
  }
  return bank;
}

int frame_count(std::size_t n_samples, int window, int hop) {
  if (hop <= 0) fail(ErrorCode::kConfig, "hop must be positive");
  if (n_samples < static_cast<std::size_t>(window)) return 0;
  return static_cast<int>(n_samples / static_cast<std::size_t>(hop));
}

MelSpectrogram log_mel_spectrogram(const AudioBuffer& buffer, const MelConfig& config) {
  if (config.window <= 0 || config.hop <= 0) fail(ErrorCode::kConfig, "window and hop must be positive");
  if (buffer.samples.size() < static_cast<std::size_t>(config.window)) {
    fail(ErrorCode::kTooShort, "buffer of " + std::to_string(buffer.samples.size()) +
                                   " samples is shorter than the " +
                                   std::to_string(config.window) + "-sample window");
  }
  const MelFilterbank bank =
      mel_filterbank(config.n_mels, config.sample_rate, config.n_fft, config.window);

  const auto n = static_cast<std::ptrdiff_t>(buffer.samples.size());
  const std::ptrdiff_t pad = config.window / 2;
  auto padded_at = [&](std::ptrdiff_t i) {
    std::ptrdiff_t j = i - pad;
    // numpy-style "reflect": the edge sample is not repeated.
    if (j < 0) j = -j;
    if (j >= n) j = 2 * (n - 1) - j;
    return static_cast<double>(buffer.samples[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, n - 1))]);
  };

  std::vector<double> hann(config.window);
  for (int i = 0; i < config.window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / config.window);
  }

  MelSpectrogram out;
  out.n_mels = config.n_mels;
  out.n_frames = frame_count(buffer.samples.size(), config.window, config.hop);
  out.window = config.window;
  out.hop = config.hop;
  out.values.assign(static_cast<std::size_t>(out.n_mels) * out.n_frames, 0.0F);

  RealFft fft(config.n_fft);
  std::vector<double> power(bank.n_bins);
  for (int t = 0; t < out.n_frames; ++t) {
    double* in = fft.input();
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * config.hop;
    for (int i = 0; i < config.window; ++i) in[i] = padded_at(start + i) * hann[i];
    std::fill(in + config.window, in + config.n_fft, 0.0);
    fft.execute();
    const fftw_complex* spec = fft.output();
    for (int k = 0; k < bank.n_bins; ++k) power[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    for (int m = 0; m < bank.n_mels; ++m) {
      const double* row = bank.weights.data() + static_cast<std::size_t>(m) * bank.n_bins;
      double e = 0.0;
      for (int k = 0; k < bank.n_bins; ++k) e += row[k] * power[k];
      out.values[static_cast<std::size_t>(m) * out.n_frames + t] =
          static_cast<float>(std::log(e + config.log_floor));
    }
  }
  return out;
}

void FeatureNormalization::apply(std::span<float> values) const {
  if (!enabled) return;
  const double inv = 1.0 / stddev;
  for (float& v : values) v = static_cast<float>((v - mean) * inv);
}

void NormalizationAccumulator::add(std::span<const float> values) {
  for (float v : values) {
    ++count_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (v - mean_);
  }
}

FeatureNormalization NormalizationAccumulator::finish() const {
  FeatureNormalization n;
  n.enabled = true;
  n.mean = mean_;
  const double var = count_ > 0 ? m2_ / static_cast<double>(count_) : 0.0;
  n.stddev = var > 1e-12 ? std::sqrt(var) : 1.0;
  return n;
}

}  // namespace callseg
