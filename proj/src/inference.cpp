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

#include "callseg/inference.hpp"

#include <cmath>
#include <cstdio>

#include "callseg/error.hpp"
#include "callseg/mel.hpp"
#include "callseg/metrics.hpp"

namespace callseg {

std::vector<SpeakerStream> build_speaker_streams(const AudioBuffer& audio,
                                                 std::span<const SegmentAnnotation> segments) {
  validate_segments(segments);
  std::vector<SpeakerStream> streams;
  std::vector<SegmentAnnotation> per_stream[2];
  for (const auto& s : segments) {
    auto g = speech_gender(s.label);
    if (!g) continue;
    std::size_t slot = 0;
    while (slot < streams.size() && streams[slot].gender != *g) ++slot;
    if (slot == streams.size()) {
      SpeakerStream st;
      st.slot = static_cast<int>(slot);
      st.gender = *g;
      streams.push_back(std::move(st));
    }
    per_stream[slot].push_back(s);
    streams[slot].talk_time += s.duration();
  }
  if (streams.empty()) fail(ErrorCode::kNoSpeech, "no speech segments in call");
  for (std::size_t i = 0; i < streams.size(); ++i) streams[i].audio = gather_segments(audio, per_stream[i]);
  return streams;
}

std::size_t window_count(std::size_t n_samples, std::size_t window, std::size_t shift) {
  if (window == 0 || shift == 0) fail(ErrorCode::kConfig, "window and shift must be positive");
  return n_samples < window ? 0 : 1 + (n_samples - window) / shift;
}

std::vector<AudioBuffer> sliding_windows(const AudioBuffer& stream, std::size_t window, std::size_t shift) {
  std::size_t n = window_count(stream.size(), window, shift);
  std::vector<AudioBuffer> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(stream.slice(i * shift, window));
  return out;
}

SpeakerVerdict aggregate_speaker(std::span<const std::vector<double>> probs) {
  if (probs.empty()) fail(ErrorCode::kNoWindows, "no windows to aggregate");
  const std::size_t k = probs[0].size();
  if (k == 0) fail(ErrorCode::kShape, "empty probability vector");
  SpeakerVerdict v;
  v.mean_probabilities.assign(k, 0.0);
  for (const auto& p : probs) {
    if (p.size() != k) fail(ErrorCode::kShape, "probability vectors differ in length");
    for (std::size_t c = 0; c < k; ++c) v.mean_probabilities[c] += p[c];
  }
  for (auto& m : v.mean_probabilities) m /= static_cast<double>(probs.size());
  v.label = argmax_index<double>(v.mean_probabilities);
  for (std::size_t c = 0; c < k; ++c) {
    if (static_cast<int>(c) != v.label && v.mean_probabilities[c] == v.mean_probabilities[v.label]) v.tie = true;
  }
  v.windows = probs.size();
  return v;
}

CallReport analyze_call(const AudioBuffer& audio, std::span<const SegmentAnnotation> segments,
                        const CrnnModel& model, const MelConfig& mel) {
  validate(audio);
  if (audio.sample_rate != mel.sample_rate) {
    fail(ErrorCode::kSampleRate, "audio is " + std::to_string(audio.sample_rate) + " Hz, features expect " +
                                     std::to_string(mel.sample_rate) + " Hz");
  }
  CallReport report;
  report.labels = model.labels();
  report.sample_rate = mel.sample_rate;
  report.window_samples = static_cast<std::size_t>(model.config().input_frames) * static_cast<std::size_t>(mel.hop);
  report.shift_samples = static_cast<std::size_t>(std::llround(kWindowShiftSeconds * mel.sample_rate));

  for (auto& stream : build_speaker_streams(audio, segments)) {
    SpeakerReport sr;
    sr.slot = stream.slot;
    sr.gender = stream.gender;
    sr.talk_time = stream.talk_time;
    for (const auto& w : sliding_windows(stream.audio, report.window_samples, report.shift_samples)) {
      auto p = model.predict(log_mel_spectrogram(w, mel));
      sr.window_probabilities.emplace_back(p.values().begin(), p.values().end());
    }
    sr.windows = sr.window_probabilities.size();
    if (sr.windows > 0) sr.verdict = aggregate_speaker(sr.window_probabilities);
    report.speakers.push_back(std::move(sr));
  }
  return report;
}

Json CallReport::to_json() const {
  Json speakers_json = Json::array();
  for (const auto& s : speakers) {
    Json j = {{"slot", s.slot},
              {"gender", to_string(s.gender)},
              {"talk_time_seconds", s.talk_time},
              {"windows", s.windows}};
    if (s.verdict) {
      j["status"] = "ok";
      j["mean_probabilities"] = s.verdict->mean_probabilities;  // in class order
      j["label"] = s.verdict->label;
      j["label_name"] = labels.name(s.verdict->label);
      j["tie"] = s.verdict->tie;
    } else {
      j["status"] = "NoWindows";
    }
    speakers_json.push_back(std::move(j));
  }
  return {{"classes", labels.names},
          {"window_seconds", static_cast<double>(window_samples) / sample_rate},
          {"shift_seconds", static_cast<double>(shift_samples) / sample_rate},
          {"speakers", speakers_json}};
}

std::string CallReport::windows_csv() const {
  std::string out = "speaker_slot,gender,window,offset_seconds";
  for (const auto& n : labels.names) {
    std::string col = n;
    for (auto& c : col) {
      if (c == ' ') c = '_';
    }
    out += ",p_" + col;
  }
  out += "\n";
  char buf[64];
  for (const auto& s : speakers) {
    for (std::size_t w = 0; w < s.window_probabilities.size(); ++w) {
      std::snprintf(buf, sizeof buf, "%d,%s,%zu,%.17g", s.slot, std::string(to_string(s.gender)).c_str(), w,
                    static_cast<double>(w * shift_samples) / sample_rate);
      out += buf;
      for (double p : s.window_probabilities[w]) {
        std::snprintf(buf, sizeof buf, ",%.17g", p);
        out += buf;
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace callseg
