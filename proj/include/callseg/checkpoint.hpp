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
#include <span>
#include <vector>

#include "callseg/model.hpp"

namespace callseg {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (all integers little-endian):
//   "CSEGCKPT" | u32 version | u32 header length | header JSON (config,
//   label convention, normalization, parameter names and shapes) |
//   u64 parameter byte count | float32 parameter blocks in declaration order |
//   u32 CRC-32 of the parameter bytes
std::vector<std::uint8_t> encode_checkpoint(const CrnnModel& model);
CrnnModel decode_checkpoint(std::span<const std::uint8_t> bytes);  // throws kCheckpoint

void save_checkpoint(const CrnnModel& model, const std::filesystem::path& path);
CrnnModel load_checkpoint(const std::filesystem::path& path);

}  // namespace callseg
