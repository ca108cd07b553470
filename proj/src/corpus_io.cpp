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

#include "callseg/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <tuple>

#include "callseg/error.hpp"
#include "callseg/npy.hpp"

namespace callseg {
namespace fs = std::filesystem;

std::string_view to_string(Split split) { return split == Split::kTrain ? "train" : "validation"; }

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation") return Split::kValidation;
  fail(ErrorCode::kInput, "unknown split '" + std::string(s) + "'");
}

void validate_speaker_id(std::string_view id) {
  bool ok = !id.empty() && id != "." && id != "..";
  for (char c : id) {
    bool good = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '_' || c == '-' || c == '.';
    ok = ok && good;
  }
  if (!ok) fail(ErrorCode::kInput, "speaker id '" + std::string(id) + "' is not a safe path component");
}

fs::path utterance_path(Split split, Role role, Gender gender, std::string_view speaker_id, int index) {
  return fs::path(std::string(to_string(split))) / std::string(to_string(role)) /
         std::string(to_string(gender)) / std::string(speaker_id) / (std::to_string(index) + ".npy");
}

namespace {

bool matches(const SpeakerEntry& s, Split split) { return s.split == split; }

template <class Pred>
std::size_t sum_utts(const std::vector<SpeakerEntry>& v, Pred p) {
  std::size_t n = 0;
  for (const auto& s : v) {
    if (p(s)) n += s.utterances;
  }
  return n;
}

template <class Pred>
std::size_t count_spk(const std::vector<SpeakerEntry>& v, Pred p) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), p));
}

void sort_entries(std::vector<SpeakerEntry>& v) {
  std::sort(v.begin(), v.end(), [](const SpeakerEntry& a, const SpeakerEntry& b) {
    return std::tie(a.split, a.speaker_id) < std::tie(b.split, b.speaker_id);
  });
}

}  // namespace

std::size_t CorpusManifest::speaker_count(Split split) const {
  return count_spk(speakers, [&](const SpeakerEntry& s) { return matches(s, split); });
}

std::size_t CorpusManifest::utterance_count(Split split) const {
  return sum_utts(speakers, [&](const SpeakerEntry& s) { return matches(s, split); });
}

std::size_t CorpusManifest::utterance_count(Split split, Role role) const {
  return sum_utts(speakers, [&](const SpeakerEntry& s) { return matches(s, split) && s.role == role; });
}

std::size_t CorpusManifest::utterance_count(Split split, Role role, Gender gender) const {
  return sum_utts(speakers, [&](const SpeakerEntry& s) {
    return matches(s, split) && s.role == role && s.gender == gender;
  });
}

std::size_t CorpusManifest::speaker_count(Split split, Role role, Gender gender) const {
  return count_spk(speakers, [&](const SpeakerEntry& s) {
    return matches(s, split) && s.role == role && s.gender == gender;
  });
}

std::size_t CorpusManifest::total_utterances() const {
  return sum_utts(speakers, [](const SpeakerEntry&) { return true; });
}

Json CorpusManifest::to_json() const {
  Json splits = Json::object();
  for (Split split : {Split::kTrain, Split::kValidation}) {
    Json roles = Json::object();
    for (Role role : {Role::kCustomer, Role::kAgent}) {
      Json genders = Json::object();
      std::size_t rs = 0, ru = 0;
      for (Gender g : {Gender::kFemale, Gender::kMale}) {
        auto ns = speaker_count(split, role, g);
        auto nu = utterance_count(split, role, g);
        genders[std::string(to_string(g))] = {{"speakers", ns}, {"utterances", nu}};
        rs += ns;
        ru += nu;
      }
      roles[std::string(to_string(role))] = {{"speakers", rs}, {"utterances", ru}, {"genders", genders}};
    }
    splits[std::string(to_string(split))] = {{"speakers", speaker_count(split)},
                                             {"utterances", utterance_count(split)},
                                             {"roles", roles}};
  }
  Json list = Json::array();
  for (const auto& s : speakers) {
    list.push_back({{"speaker_id", s.speaker_id},
                    {"split", to_string(s.split)},
                    {"role", to_string(s.role)},
                    {"gender", to_string(s.gender)},
                    {"utterances", s.utterances}});
  }
  return {{"format", "callseg-corpus"},
          {"version", 1},
          {"total_utterances", total_utterances()},
          {"splits", splits},
          {"speakers", list}};
}

CorpusManifest CorpusManifest::from_json(const Json& j) {
  CorpusManifest m;
  try {
    for (const auto& s : j.at("speakers")) {
      m.speakers.push_back({s.at("speaker_id").get<std::string>(),
                            parse_split(s.at("split").get<std::string>()),
                            parse_role(s.at("role").get<std::string>()),
                            parse_gender(s.at("gender").get<std::string>()),
                            s.at("utterances").get<std::size_t>()});
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kFormat, std::string("manifest: ") + e.what());
  }
  sort_entries(m.speakers);
  return m;
}

CorpusManifest write_corpus(std::span<const Utterance> utterances, const SplitAssignment& assignment,
                            const fs::path& root, const MelConfig& mel) {
  std::map<std::string, Split> split_of;
  for (const auto& [id, split] : assignment) {
    auto [it, inserted] = split_of.emplace(id, split);
    if (!inserted && it->second != split) {
      fail(ErrorCode::kSplitLeak, "speaker " + id + " is assigned to both train and validation");
    }
  }

  std::map<std::string, SpeakerEntry> entries;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& u : utterances) {
    validate_speaker_id(u.speaker_id);
    if (u.class_label < 0 || u.class_label > 3) {
      fail(ErrorCode::kLabel, "utterance class " + std::to_string(u.class_label) + " is not a 4-class label");
    }
    auto sit = split_of.find(u.speaker_id);
    if (sit == split_of.end()) fail(ErrorCode::kInput, "speaker " + u.speaker_id + " has no split");
    if (!seen.emplace(u.speaker_id, u.index).second) {
      fail(ErrorCode::kData, "duplicate utterance " + std::to_string(u.index) + " for " + u.speaker_id);
    }
    auto [eit, fresh] = entries.try_emplace(u.speaker_id, SpeakerEntry{u.speaker_id, sit->second, u.role(),
                                                                       u.gender(), 0});
    if (!fresh && (eit->second.role != u.role() || eit->second.gender != u.gender())) {
      fail(ErrorCode::kData, "speaker " + u.speaker_id + " carries more than one class label");
    }
    ++eit->second.utterances;
  }

  for (const auto& u : utterances) {
    const auto& e = entries.at(u.speaker_id);
    auto path = root / utterance_path(e.split, e.role, e.gender, e.speaker_id, u.index);
    fs::create_directories(path.parent_path());
    MelSpectrogram computed;
    const MelSpectrogram* f = u.features ? &*u.features : &(computed = log_mel_spectrogram(u.audio, mel));
    std::size_t shape[2] = {static_cast<std::size_t>(f->n_mels), static_cast<std::size_t>(f->n_frames)};
    save_npy(path, f->values, shape);
  }

  CorpusManifest m;
  for (auto& [id, e] : entries) m.speakers.push_back(e);
  sort_entries(m.speakers);
  fs::create_directories(root);
  write_json_file(root / kManifestFile, m.to_json());
  return m;
}

std::vector<CorpusItem> scan_corpus(const fs::path& root, Split split) {
  std::vector<CorpusItem> items;
  fs::path base = root / std::string(to_string(split));
  if (!fs::exists(base)) return items;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(base, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const fs::path& p = it->path();
    auto rel = fs::relative(p, base);
    std::vector<std::string> parts;
    for (const auto& c : rel) parts.push_back(c.string());
    auto layout_error = [&](const std::string& why) {
      fail(ErrorCode::kLayout, "unexpected corpus path " + p.string() + " (" + why + ")");
    };
    if (parts.size() != 4) layout_error("expected <role>/<gender>/<speaker>/<index>.npy");
    Role role{};
    Gender gender{};
    try {
      role = parse_role(parts[0]);
    } catch (const Error&) {
      layout_error("role '" + parts[0] + "'");
    }
    try {
      gender = parse_gender(parts[1]);
    } catch (const Error&) {
      layout_error("gender '" + parts[1] + "'");
    }
    const std::string& file = parts[3];
    if (file.size() <= 4 || file.substr(file.size() - 4) != ".npy") layout_error("not an .npy file");
    int index = 0;
    auto stem = std::string_view(file).substr(0, file.size() - 4);
    auto [ptr, perr] = std::from_chars(stem.data(), stem.data() + stem.size(), index);
    if (perr != std::errc() || ptr != stem.data() + stem.size() || index < 0) {
      layout_error("utterance number '" + std::string(stem) + "'");
    }
    items.push_back({p, two_class_label(role), four_class_label(role, gender), parts[2], index});
  }
  if (ec) fail(ErrorCode::kIo, "cannot scan " + base.string() + ": " + ec.message());
  std::sort(items.begin(), items.end(), [](const CorpusItem& a, const CorpusItem& b) { return a.path < b.path; });
  return items;
}

CorpusManifest manifest_from_disk(const fs::path& root) {
  std::map<std::pair<Split, std::string>, SpeakerEntry> entries;
  for (Split split : {Split::kTrain, Split::kValidation}) {
    for (const auto& item : scan_corpus(root, split)) {
      auto key = std::make_pair(split, item.speaker_id);
      auto [it, fresh] = entries.try_emplace(
          key, SpeakerEntry{item.speaker_id, split, role_of(item.label4), gender_of(item.label4), 0});
      if (!fresh && (it->second.role != role_of(item.label4) || it->second.gender != gender_of(item.label4))) {
        fail(ErrorCode::kLayout, "speaker " + item.speaker_id + " appears under two classes");
      }
      ++it->second.utterances;
    }
  }
  CorpusManifest m;
  for (auto& [k, e] : entries) m.speakers.push_back(e);
  sort_entries(m.speakers);
  return m;
}

}  // namespace callseg
