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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace callseg {

inline constexpr int kDefaultSampleRate = 8000;

// Mono signal with samples in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  // Copy of samples [begin, begin + count).
  AudioBuffer slice(std::size_t begin, std::size_t count) const;
};

// Throws kInput if the rate is not positive or any sample is non-finite.
void validate(const AudioBuffer& buffer);

// Decodes a single-channel RIFF/WAVE image. Accepts integer PCM of 8, 16, 24
// or 32 bits and 32-bit IEEE float, plain or WAVE_FORMAT_EXTENSIBLE.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes, int expected_rate);

AudioBuffer load_audio(const std::filesystem::path& path,
                       int expected_rate = kDefaultSampleRate);

enum class WavEncoding { kPcm16, kFloat32 };

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer,
                                     WavEncoding encoding = WavEncoding::kPcm16,
                                     int channels = 1);

void save_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
              WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace callseg
