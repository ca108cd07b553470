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

#include "callseg/prepare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "callseg/csv.hpp"
#include "callseg/error.hpp"
#include "callseg/rng.hpp"

namespace callseg {
namespace fs = std::filesystem;

Json PrepareReport::to_json() const {
  Json rej = Json::array();
  for (const auto& r : rejections) {
    rej.push_back({{"subject", r.subject}, {"reason", r.reason}, {"detail", r.detail}});
  }
  return {{"calls_total", calls_total},
          {"calls_accepted", calls_accepted},
          {"rejections", rej},
          {"manifest", manifest.to_json()}};
}

std::string PrepareReport::summary() const {
  std::ostringstream out;
  out << "calls: " << calls_total << " total, " << calls_accepted << " accepted\n";
  for (Split split : {Split::kTrain, Split::kValidation}) {
    for (Role role : {Role::kCustomer, Role::kAgent}) {
      for (Gender g : {Gender::kFemale, Gender::kMale}) {
        out << to_string(split) << " " << to_string(g) << " " << to_string(role) << ": "
            << manifest.speaker_count(split, role, g) << " speakers, "
            << manifest.utterance_count(split, role, g) << " utterances\n";
      }
    }
    out << to_string(split) << " total: " << manifest.speaker_count(split) << " speakers, "
        << manifest.utterance_count(split) << " utterances\n";
  }
  std::map<std::string, std::size_t> reasons;
  for (const auto& r : rejections) ++reasons[r.reason];
  for (const auto& [reason, n] : reasons) out << "rejected (" << reason << "): " << n << "\n";
  return out.str();
}

SplitAssignment read_split_csv(const fs::path& path) {
  auto table = read_csv(path);
  auto c_id = table.require_column("speaker_id");
  auto c_split = table.require_column("split");
  SplitAssignment out;
  for (const auto& row : table.rows) out.emplace_back(row[c_id], parse_split(row[c_split]));
  return out;
}

SplitAssignment random_split(std::vector<std::string> speakers, double validation_fraction,
                             std::uint64_t seed) {
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    fail(ErrorCode::kConfig, "validation fraction must lie in [0, 1)");
  }
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()), speakers.end());
  std::size_t n = speakers.size();
  std::size_t n_val = 0;
  if (n >= 2) {
    n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(validation_fraction * n)));
    n_val = std::min(n_val, n - 1);
  }
  Rng rng(derive_seed(seed, 0x5b17));
  rng.shuffle(std::span<std::string>(speakers));
  SplitAssignment out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(speakers[i], i < n_val ? Split::kValidation : Split::kTrain);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct AcceptedCall {
  CallMetadata meta;
  std::vector<LabeledSpeaker> speakers;
};

std::string reason_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingleGender: return "single_gender";
    case ErrorCode::kNoSpeech: return "no_speech";
    default: return "error";
  }
}

}  // namespace

PrepareReport prepare_corpus(const std::vector<CallMetadata>& calls_in, const PrepareOptions& opt) {
  PrepareReport report;
  report.calls_total = calls_in.size();

  std::vector<CallMetadata> calls = calls_in;
  std::stable_sort(calls.begin(), calls.end(),
                   [](const CallMetadata& a, const CallMetadata& b) { return a.call_id < b.call_id; });

  std::vector<AcceptedCall> accepted;
  std::set<std::string> call_ids;
  for (const auto& meta : calls) {
    if (!call_ids.insert(meta.call_id).second) {
      report.rejections.push_back({meta.call_id, "error", "duplicate call id"});
      continue;
    }
    if (!duration_accepted(meta.duration)) {
      std::ostringstream d;
      d << "duration " << meta.duration << " s outside [" << kMinCallSeconds << ", " << kMaxCallSeconds << "]";
      report.rejections.push_back({meta.call_id, "duration", d.str()});
      continue;
    }
    try {
      auto segments = load_segments(opt.segments_dir / (meta.call_id + ".csv"));
      accepted.push_back({meta, dbas_label(segments, meta)});
    } catch (const Error& e) {
      report.rejections.push_back({meta.call_id, reason_for(e.code()), e.detail()});
    }
  }

  // Gender and role history of every speaker across accepted calls.
  std::map<std::string, std::vector<Gender>> history;
  std::map<std::string, std::set<Role>> roles;
  for (const auto& call : accepted) {
    for (const auto& s : call.speakers) {
      history[s.speaker_id].push_back(s.gender);
      roles[s.speaker_id].insert(s.role);
    }
  }
  auto retained = consistency_filter(history);
  for (const auto& [id, labels] : history) {
    bool role_clash = roles[id].size() > 1;
    if (retained.count(id) && !role_clash) continue;
    retained.erase(id);
    std::string detail = role_clash ? "appears as both agent and customer; genders" : "genders";
    for (Gender g : labels) detail += " " + std::string(to_string(g));
    report.rejections.push_back({id, "inconsistent_speaker", detail});
  }

  std::vector<Utterance> utterances;
  std::map<std::string, int> next_index;
  for (const auto& call : accepted) {
    AudioBuffer audio;
    try {
      fs::path p = call.meta.audio_path;
      audio = load_audio(p.is_absolute() ? p : opt.audio_dir / p, opt.mel.sample_rate);
    } catch (const Error& e) {
      report.rejections.push_back({call.meta.call_id, "error", e.detail()});
      continue;
    }
    ++report.calls_accepted;
    for (const auto& s : call.speakers) {
      next_index.try_emplace(s.speaker_id, 0);
      if (!retained.count(s.speaker_id)) continue;
      auto stream = gather_segments(audio, s.segments);
      auto cut = cut_utterances(stream, s.speaker_id, s.four_class(), next_index[s.speaker_id],
                                opt.utterance_seconds);
      next_index[s.speaker_id] += static_cast<int>(cut.size());
      for (auto& u : cut) {
        u.features = log_mel_spectrogram(u.audio, opt.mel);
        u.audio = AudioBuffer{};
        utterances.push_back(std::move(u));
      }
    }
  }

  std::vector<std::string> speakers;
  for (const auto& [id, n] : next_index) {
    if (!retained.count(id)) continue;
    if (n == 0) {
      report.rejections.push_back({id, "too_short", "speech shorter than one utterance"});
    } else {
      speakers.push_back(id);
    }
  }

  SplitAssignment assignment = opt.split_csv ? read_split_csv(*opt.split_csv)
                                             : random_split(speakers, opt.validation_fraction, opt.seed);
  report.manifest = write_corpus(utterances, assignment, opt.out_root, opt.mel);
  return report;
}

}  // namespace callseg
