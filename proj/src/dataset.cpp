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

#include "callseg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "callseg/csv.hpp"
#include "callseg/error.hpp"

namespace callseg {
namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::size_t to_sample(double seconds, int rate) {
  if (seconds <= 0.0) return 0;
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

}  // namespace

std::string_view to_string(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::kSpeechFemale: return "speech_female";
    case SegmentLabel::kSpeechMale: return "speech_male";
    case SegmentLabel::kMusic: return "music";
    case SegmentLabel::kNoise: return "noise";
    case SegmentLabel::kSilence: return "silence";
  }
  return "?";
}

SegmentLabel parse_segment_label(std::string_view s) {
  for (auto l : {SegmentLabel::kSpeechFemale, SegmentLabel::kSpeechMale, SegmentLabel::kMusic,
                 SegmentLabel::kNoise, SegmentLabel::kSilence}) {
    if (to_string(l) == s) return l;
  }
  fail(ErrorCode::kFormat, "unknown segment label '" + std::string(s) + "'");
}

std::optional<Gender> speech_gender(SegmentLabel label) {
  if (label == SegmentLabel::kSpeechFemale) return Gender::kFemale;
  if (label == SegmentLabel::kSpeechMale) return Gender::kMale;
  return std::nullopt;
}

SegmentLabel speech_label(Gender gender) {
  return gender == Gender::kMale ? SegmentLabel::kSpeechMale : SegmentLabel::kSpeechFemale;
}

void validate_segments(std::span<const SegmentAnnotation> segments) {
  double prev_end = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.start >= 0.0) || !(s.start < s.end) || !std::isfinite(s.end)) {
      fail(ErrorCode::kInput, "segment " + std::to_string(i) + " needs 0 <= start < end");
    }
    if (s.start < prev_end) {
      fail(ErrorCode::kInput, "segment " + std::to_string(i) + " overlaps or is out of order");
    }
    prev_end = s.end;
  }
}

std::vector<SegmentAnnotation> parse_segments_csv(std::string_view text) {
  auto table = parse_csv(text);
  auto cs = table.require_column("start");
  auto ce = table.require_column("end");
  auto cl = table.require_column("label");
  std::vector<SegmentAnnotation> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back({parse_real(row[cs], "start"), parse_real(row[ce], "end"),
                   parse_segment_label(row[cl])});
  }
  validate_segments(out);
  return out;
}

std::vector<SegmentAnnotation> load_segments(const std::filesystem::path& path) {
  try {
    return parse_segments_csv(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string segments_csv(std::span<const SegmentAnnotation> segments) {
  std::string out = "start,end,label\n";
  for (const auto& s : segments) {
    out += shortest(s.start) + "," + shortest(s.end) + "," + std::string(to_string(s.label)) + "\n";
  }
  return out;
}

std::vector<CallMetadata> parse_calls_csv(std::string_view text) {
  auto table = parse_csv(text);
  auto c_id = table.require_column("call_id");
  auto c_agent = table.require_column("agent_id");
  auto c_gender = table.require_column("agent_gender");
  auto c_dur = table.require_column("duration");
  auto c_audio = table.require_column("audio_path");
  int c_customer = table.column("customer_id");
  std::vector<CallMetadata> out;
  for (const auto& row : table.rows) {
    CallMetadata m;
    m.call_id = row[c_id];
    m.agent_id = row[c_agent];
    m.agent_gender = parse_gender(row[c_gender]);
    m.duration = parse_real(row[c_dur], "duration");
    m.audio_path = row[c_audio];
    if (c_customer >= 0 && !row[static_cast<std::size_t>(c_customer)].empty()) {
      m.customer_id = row[static_cast<std::size_t>(c_customer)];
    } else {
      m.customer_id = m.call_id + "_customer";
    }
    if (m.call_id.empty() || m.agent_id.empty()) fail(ErrorCode::kInput, "empty call or agent id");
    if (!(m.duration > 0.0)) fail(ErrorCode::kInput, "call " + m.call_id + ": duration must be > 0");
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<CallMetadata> load_calls(const std::filesystem::path& path) {
  try {
    return parse_calls_csv(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string calls_csv(std::span<const CallMetadata> calls) {
  std::string out = "call_id,agent_id,agent_gender,duration,audio_path,customer_id\n";
  for (const auto& c : calls) {
    out += c.call_id + "," + c.agent_id + "," + std::string(to_string(c.agent_gender)) + "," +
           shortest(c.duration) + "," + c.audio_path + "," + c.customer_id + "\n";
  }
  return out;
}

bool duration_accepted(double seconds) {
  return seconds >= kMinCallSeconds && seconds <= kMaxCallSeconds;
}

std::vector<CallMetadata> filter_calls(std::span<const CallMetadata> calls) {
  std::vector<CallMetadata> out;
  for (const auto& c : calls) {
    if (duration_accepted(c.duration)) out.push_back(c);
  }
  return out;
}

std::vector<LabeledSpeaker> dbas_label(std::span<const SegmentAnnotation> segments,
                                       const CallMetadata& meta) {
  validate_segments(segments);
  LabeledSpeaker agent{meta.agent_id, Role::kAgent, meta.agent_gender, {}};
  LabeledSpeaker customer{meta.customer_id, Role::kCustomer, opposite(meta.agent_gender), {}};
  for (const auto& s : segments) {
    auto g = speech_gender(s.label);
    if (!g) continue;
    (*g == meta.agent_gender ? agent : customer).segments.push_back(s);
  }
  if (agent.segments.empty() && customer.segments.empty()) {
    fail(ErrorCode::kNoSpeech, "call " + meta.call_id + " has no speech segments");
  }
  if (agent.segments.empty() || customer.segments.empty()) {
    fail(ErrorCode::kSingleGender, "call " + meta.call_id + " has speech of one gender only");
  }
  if (agent.speaker_id == customer.speaker_id) {
    fail(ErrorCode::kInput, "call " + meta.call_id + ": agent and customer share an id");
  }
  return {std::move(agent), std::move(customer)};
}

std::set<std::string> consistency_filter(const std::map<std::string, std::vector<Gender>>& history) {
  std::set<std::string> keep;
  for (const auto& [id, labels] : history) {
    if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end()) {
      keep.insert(id);
    }
  }
  return keep;
}

AudioBuffer gather_segments(const AudioBuffer& audio, std::span<const SegmentAnnotation> segments) {
  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  for (const auto& s : segments) {
    std::size_t b = std::min(to_sample(s.start, audio.sample_rate), audio.size());
    std::size_t e = std::min(to_sample(s.end, audio.sample_rate), audio.size());
    out.samples.insert(out.samples.end(), audio.samples.begin() + static_cast<std::ptrdiff_t>(b),
                       audio.samples.begin() + static_cast<std::ptrdiff_t>(e));
  }
  return out;
}

std::vector<Utterance> cut_utterances(const AudioBuffer& stream, const std::string& speaker_id,
                                      int class_label, int first_index, double utterance_seconds) {
  if (!(utterance_seconds > 0.0)) fail(ErrorCode::kConfig, "utterance length must be positive");
  auto len = static_cast<std::size_t>(std::llround(utterance_seconds * stream.sample_rate));
  if (len == 0) fail(ErrorCode::kConfig, "utterance shorter than one sample");
  std::vector<Utterance> out;
  std::size_t n = stream.size() / len;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({speaker_id, class_label, first_index + static_cast<int>(i),
                   stream.slice(i * len, len), std::nullopt});
  }
  return out;
}

}  // namespace callseg
