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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "callseg/dataset.hpp"
#include "callseg/json_io.hpp"
#include "callseg/mel.hpp"

namespace callseg {

// On-disk layout: <root>/<train|validation>/<agent|customer>/<female|male>/<speaker>/<j>.npy

enum class Split { kTrain, kValidation };

std::string_view to_string(Split split);
Split parse_split(std::string_view s);  // throws kInput

using SplitAssignment = std::vector<std::pair<std::string, Split>>;

std::filesystem::path utterance_path(Split split, Role role, Gender gender,
                                     std::string_view speaker_id, int index);

// Throws kInput for ids that are empty or contain anything but [A-Za-z0-9_.-].
void validate_speaker_id(std::string_view id);

struct SpeakerEntry {
  std::string speaker_id;
  Split split = Split::kTrain;
  Role role = Role::kCustomer;
  Gender gender = Gender::kFemale;
  std::size_t utterances = 0;

  friend bool operator==(const SpeakerEntry&, const SpeakerEntry&) = default;
};

struct CorpusManifest {
  std::vector<SpeakerEntry> speakers;  // sorted by (split, speaker_id)

  std::size_t speaker_count(Split split) const;
  std::size_t utterance_count(Split split) const;
  std::size_t utterance_count(Split split, Role role) const;
  std::size_t utterance_count(Split split, Role role, Gender gender) const;
  std::size_t speaker_count(Split split, Role role, Gender gender) const;
  std::size_t total_utterances() const;

  Json to_json() const;
  static CorpusManifest from_json(const Json& j);

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

inline constexpr const char* kManifestFile = "manifest.json";

// Writes every utterance's features (computed with `mel` when absent) and
// <root>/manifest.json. Throws kSplitLeak when a speaker is assigned to both
// splits, kInput for unassigned speakers, kData when one speaker carries two
// class labels.
CorpusManifest write_corpus(std::span<const Utterance> utterances, const SplitAssignment& assignment,
                            const std::filesystem::path& root, const MelConfig& mel = {});

struct CorpusItem {
  std::filesystem::path path;
  int label2 = 0;
  int label4 = 0;
  std::string speaker_id;
  int index = 0;
};

// Labels are decoded from path components only; results are sorted by path.
// A missing split directory is an empty list; unexpected components raise
// kLayout naming the path.
std::vector<CorpusItem> scan_corpus(const std::filesystem::path& root, Split split);

// Manifest recomputed from the files on disk.
CorpusManifest manifest_from_disk(const std::filesystem::path& root);

}  // namespace callseg
