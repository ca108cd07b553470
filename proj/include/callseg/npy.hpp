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
#include <vector>

namespace callseg {

// A C-contiguous float32 array as stored in a version 1.0 .npy container.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

std::vector<std::uint8_t> encode_npy(std::span<const float> data,
                                     std::span<const std::size_t> shape);

// Accepts '<f4' and '<f8' (narrowed to float), C order; header versions 1-3.
NpyArray decode_npy(std::span<const std::uint8_t> bytes);

void save_npy(const std::filesystem::path& path, std::span<const float> data,
              std::span<const std::size_t> shape);

NpyArray load_npy(const std::filesystem::path& path);

}  // namespace callseg
