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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "callseg/audio.hpp"
#include "callseg/dataset.hpp"
#include "callseg/json_io.hpp"
#include "callseg/model.hpp"

namespace callseg {

inline constexpr double kWindowShiftSeconds = 1.0;

// All speech of one gender within a call, in temporal order. Slot 0 is the
// gender that speaks first.
struct SpeakerStream {
  int slot = 0;
  Gender gender = Gender::kFemale;
  AudioBuffer audio;
  double talk_time = 0.0;  // sum of the speech segment durations, seconds
  std::size_t windows = 0;  // filled in by analyze_call
};

// Throws kNoSpeech when no segment is speech.
std::vector<SpeakerStream> build_speaker_streams(const AudioBuffer& audio,
                                                 std::span<const SegmentAnnotation> segments);

// 1 + floor((n - window) / shift) for n >= window, else 0.
std::size_t window_count(std::size_t n_samples, std::size_t window, std::size_t shift);

// Windows of `window` samples at offsets 0, shift, 2*shift, ...
std::vector<AudioBuffer> sliding_windows(const AudioBuffer& stream, std::size_t window, std::size_t shift);

struct SpeakerVerdict {
  std::vector<double> mean_probabilities;
  int label = -1;
  bool tie = false;
  std::size_t windows = 0;
};

// Per-class mean in index order, argmax with ties to the lowest index.
// Throws kNoWindows for an empty list and kShape for ragged vectors.
SpeakerVerdict aggregate_speaker(std::span<const std::vector<double>> window_probabilities);

struct SpeakerReport {
  int slot = 0;
  Gender gender = Gender::kFemale;
  double talk_time = 0.0;
  std::size_t windows = 0;
  std::optional<SpeakerVerdict> verdict;  // empty when the stream is too short
  std::vector<std::vector<double>> window_probabilities;
};

struct CallReport {
  LabelConvention labels;
  int sample_rate = kDefaultSampleRate;
  std::size_t window_samples = 0;
  std::size_t shift_samples = 0;
  std::vector<SpeakerReport> speakers;

  Json to_json() const;
  // speaker_slot,gender,window,offset_seconds,p_<class>...
  std::string windows_csv() const;
};

// Window length follows the model's input frames (frames * hop samples),
// shifted by one second.
CallReport analyze_call(const AudioBuffer& audio, std::span<const SegmentAnnotation> segments,
                        const CrnnModel& model, const MelConfig& mel = {});

}  // namespace callseg
