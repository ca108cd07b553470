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
#include <filesystem>
#include <string>
#include <vector>

#include "callseg/audio.hpp"
#include "callseg/corpus.hpp"
#include "callseg/dataset.hpp"
#include "callseg/json_io.hpp"
#include "callseg/labels.hpp"

namespace callseg {

// Synthetic voices are separable by construction: gender sets the
// fundamental register, role sets the amplitude rhythm. Agents carry a fast
// sinusoidal modulation and never fall silent; customers speak in irregular
// on/off runs.
inline constexpr double kFemaleF0Min = 190.0, kFemaleF0Max = 250.0;
inline constexpr double kMaleF0Min = 90.0, kMaleF0Max = 150.0;

struct SynthVoice {
  std::string speaker_id;
  int class_label = 0;  // 4-class
  std::uint64_t seed = 0;
  double f0 = 200.0;                 // Hz
  double tilt = 1.0;                 // harmonic amplitude ~ h^-tilt
  std::vector<double> harmonic_gain;  // per-harmonic jitter
  double vibrato_hz = 5.0;
  double vibrato_depth = 0.01;  // relative
  double am_hz = 6.0;           // agents only
  double am_depth = 0.5;
  double noise_level = 0.01;

  Role role() const { return role_of(class_label); }
  Gender gender() const { return gender_of(class_label); }
};

SynthVoice make_voice(std::string speaker_id, int class_label, std::uint64_t seed,
                      double noise_level = 0.01);

// `n_samples` of the voice at 8 kHz; `take` selects an independent excerpt.
AudioBuffer synthesize(const SynthVoice& voice, std::size_t n_samples, std::uint64_t take,
                       int sample_rate = kDefaultSampleRate);

struct SynthSplitSpec {
  std::array<int, 4> speakers{};    // per 4-class label
  std::array<int, 4> utterances{};  // per speaker, per 4-class label
};

struct SynthSpec {
  SynthSplitSpec train{{6, 6, 6, 6}, {20, 20, 20, 20}};
  SynthSplitSpec validation{{2, 2, 2, 2}, {20, 20, 20, 20}};
  double utterance_seconds = kUtteranceSeconds;
  double noise_level = 0.01;
};

// Keys: utterance_seconds, noise_level, train/validation with
// speakers_per_class and utterances_per_speaker, each a scalar or a 4-array.
void from_json(const Json& j, SynthSpec& spec);
void to_json(Json& j, const SynthSpec& spec);

// "<train|val>_c<class>_s<index>"
std::string synth_speaker_id(Split split, int class_label, int index);

std::vector<SynthVoice> synth_voices(const SynthSpec& spec, Split split, std::uint64_t seed);

CorpusManifest synth_corpus(const SynthSpec& spec, std::uint64_t seed, const std::filesystem::path& root,
                            const MelConfig& mel = {});

struct SynthCall {
  AudioBuffer audio;
  std::vector<SegmentAnnotation> segments;
  CallMetadata meta;
};

struct SynthCallSpec {
  double duration = 60.0;  // seconds
  double turn_min = 3.0, turn_max = 7.0;
  double gap_min = 0.2, gap_max = 0.8;  // non-speech between turns
  double noise_level = 0.01;
};

// Alternating turns of two voices, agent first, separated by short
// silence/noise/music segments. Speech segments carry each voice's gender.
SynthCall synth_call(const SynthVoice& agent, const SynthVoice& customer, const SynthCallSpec& spec,
                     std::uint64_t seed, const std::string& call_id = "call");

}  // namespace callseg
