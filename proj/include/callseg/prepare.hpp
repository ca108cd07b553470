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
#include <optional>
#include <string>
#include <vector>

#include "callseg/corpus.hpp"
#include "callseg/json_io.hpp"
#include "callseg/mel.hpp"

namespace callseg {

struct PrepareOptions {
  std::filesystem::path segments_dir;  // one <call_id>.csv per call
  std::filesystem::path audio_dir;     // base for relative audio_path entries
  std::filesystem::path out_root;
  // CSV `speaker_id,split`; without it speakers are shuffled with `seed` and
  // `validation_fraction` of them (at least one) go to validation.
  std::optional<std::filesystem::path> split_csv;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  double utterance_seconds = kUtteranceSeconds;
  MelConfig mel;
};

struct Rejection {
  std::string subject;  // call id or speaker id
  std::string reason;   // duration | single_gender | no_speech | inconsistent_speaker | too_short | error
  std::string detail;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct PrepareReport {
  std::size_t calls_total = 0;
  std::size_t calls_accepted = 0;
  std::vector<Rejection> rejections;
  CorpusManifest manifest;

  Json to_json() const;
  // Speaker and utterance counts per split and class, one line each.
  std::string summary() const;
};

SplitAssignment read_split_csv(const std::filesystem::path& path);

// Seeded split over speaker ids (sorted first, so input order is irrelevant).
SplitAssignment random_split(std::vector<std::string> speakers, double validation_fraction,
                             std::uint64_t seed);

// Length filter, DBAS labeling, cross-call consistency, per-speaker bundling
// and cutting, then write_corpus. Per-call failures become rejections.
PrepareReport prepare_corpus(const std::vector<CallMetadata>& calls, const PrepareOptions& options);

}  // namespace callseg
