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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "callseg/audio.hpp"
#include "callseg/labels.hpp"
#include "callseg/mel.hpp"

namespace callseg {

enum class SegmentLabel { kSpeechFemale, kSpeechMale, kMusic, kNoise, kSilence };

std::string_view to_string(SegmentLabel label);
SegmentLabel parse_segment_label(std::string_view s);  // throws kFormat
std::optional<Gender> speech_gender(SegmentLabel label);
SegmentLabel speech_label(Gender gender);

struct SegmentAnnotation {
  double start = 0.0;  // seconds
  double end = 0.0;
  SegmentLabel label = SegmentLabel::kSilence;

  double duration() const { return end - start; }
  friend bool operator==(const SegmentAnnotation&, const SegmentAnnotation&) = default;
};

// 0 <= start < end, sorted, non-overlapping; throws kInput.
void validate_segments(std::span<const SegmentAnnotation> segments);

// CSV with header `start,end,label`.
std::vector<SegmentAnnotation> parse_segments_csv(std::string_view text);
std::vector<SegmentAnnotation> load_segments(const std::filesystem::path& path);
std::string segments_csv(std::span<const SegmentAnnotation> segments);

struct CallMetadata {
  std::string call_id;
  std::string agent_id;
  Gender agent_gender = Gender::kFemale;
  double duration = 0.0;  // seconds
  std::string customer_id;
  std::string audio_path;
};

// CSV with header `call_id,agent_id,agent_gender,duration,audio_path`, plus an
// optional `customer_id` column; without it each call gets its own customer
// "<call_id>_customer".
std::vector<CallMetadata> parse_calls_csv(std::string_view text);
std::vector<CallMetadata> load_calls(const std::filesystem::path& path);
std::string calls_csv(std::span<const CallMetadata> calls);

inline constexpr double kMinCallSeconds = 60.0;
inline constexpr double kMaxCallSeconds = 600.0;

bool duration_accepted(double seconds);  // inclusive bounds

std::vector<CallMetadata> filter_calls(std::span<const CallMetadata> calls);

// One speaker of an annotated call.
struct LabeledSpeaker {
  std::string speaker_id;
  Role role = Role::kCustomer;
  Gender gender = Gender::kFemale;
  std::vector<SegmentAnnotation> segments;  // this speaker's speech, in order

  int four_class() const { return four_class_label(role, gender); }
};

// Database-based annotation: the speech gender matching the agent's known
// gender belongs to the agent, the opposite gender to the customer. Throws
// kNoSpeech without speech and kSingleGender when only one gender speaks.
// Returns {agent, customer}.
std::vector<LabeledSpeaker> dbas_label(std::span<const SegmentAnnotation> segments,
                                       const CallMetadata& meta);

// Speakers whose gender labels agree across all their calls.
std::set<std::string> consistency_filter(const std::map<std::string, std::vector<Gender>>& history);

// Concatenation of the audio under `segments`, clipped to the buffer.
AudioBuffer gather_segments(const AudioBuffer& audio, std::span<const SegmentAnnotation> segments);

inline constexpr double kUtteranceSeconds = 10.0;

struct Utterance {
  std::string speaker_id;
  int class_label = 0;  // 4-class label; the 2-class label is class_label / 2
  int index = 0;
  AudioBuffer audio;
  std::optional<MelSpectrogram> features;

  Role role() const { return role_of(class_label); }
  Gender gender() const { return gender_of(class_label); }
};

// floor(L / utterance_seconds) consecutive, non-overlapping slices from the
// stream start, indexed first_index, first_index + 1, ...
std::vector<Utterance> cut_utterances(const AudioBuffer& stream, const std::string& speaker_id,
                                      int class_label, int first_index = 0,
                                      double utterance_seconds = kUtteranceSeconds);

}  // namespace callseg
