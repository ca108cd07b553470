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

#include "callseg/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <regex>
#include <string>

#include "callseg/error.hpp"

namespace callseg {

namespace {

constexpr std::uint8_t kMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};

std::string shape_literal(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

}  // namespace

std::vector<std::uint8_t> encode_npy(std::span<const float> data,
                                     std::span<const std::size_t> shape) {
  const std::size_t count = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                            std::multiplies<>());
  if (count != data.size()) fail(ErrorCode::kShape, "npy shape does not match data length");

  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " +
                       shape_literal(shape) + ", }";
  // magic(6) + version(2) + length(2) + header, padded to a multiple of 64
  // and terminated by a newline.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::vector<std::uint8_t> out(10 + header.size() + data.size() * 4);
  std::memcpy(out.data(), kMagic, 6);
  out[6] = 1;
  out[7] = 0;
  out[8] = static_cast<std::uint8_t>(header.size() & 0xFF);
  out[9] = static_cast<std::uint8_t>(header.size() >> 8);
  std::memcpy(out.data() + 10, header.data(), header.size());
  std::uint8_t* p = out.data() + 10 + header.size();
  for (float v : data) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) *p++ = static_cast<std::uint8_t>(bits >> (8 * i));
  }
  return out;
}

NpyArray decode_npy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0) {
    fail(ErrorCode::kFormat, "missing NPY magic");
  }
  const std::uint8_t major = bytes[6];
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = bytes[8] | (bytes[9] << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(ErrorCode::kFormat, "truncated NPY preamble");
    header_len = static_cast<std::size_t>(bytes[8]) | (bytes[9] << 8) | (bytes[10] << 16) |
                 (static_cast<std::size_t>(bytes[11]) << 24);
    offset = 12;
  } else {
    fail(ErrorCode::kFormat, "unsupported NPY version " + std::to_string(major));
  }
  if (offset + header_len > bytes.size()) fail(ErrorCode::kFormat, "truncated NPY header");
  const std::string header(reinterpret_cast<const char*>(bytes.data() + offset), header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([<>|=]?[a-z]\d+)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;
  if (!std::regex_search(header, m, descr_re)) fail(ErrorCode::kFormat, "NPY header lacks descr");
  const std::string descr = m[1];
  if (!std::regex_search(header, m, order_re)) fail(ErrorCode::kFormat, "NPY header lacks fortran_order");
  if (m[1] == "True") fail(ErrorCode::kFormat, "Fortran-ordered arrays are not supported");
  if (!std::regex_search(header, m, shape_re)) fail(ErrorCode::kFormat, "NPY header lacks shape");

  NpyArray out;
  const std::string dims = m[1];
  static const std::regex int_re(R"(\d+)");
  for (auto it = std::sregex_iterator(dims.begin(), dims.end(), int_re);
       it != std::sregex_iterator(); ++it) {
    out.shape.push_back(static_cast<std::size_t>(std::stoull(it->str())));
  }
  const std::size_t count = std::accumulate(out.shape.begin(), out.shape.end(),
                                            std::size_t{1}, std::multiplies<>());
  std::size_t width = 0;
  if (descr == "<f4") {
    width = 4;
  } else if (descr == "<f8") {
    width = 8;
  } else {
    fail(ErrorCode::kFormat, "unsupported NPY dtype " + descr);
  }
  const std::size_t body = offset + header_len;
  if (bytes.size() - body < count * width) fail(ErrorCode::kFormat, "truncated NPY data");

  out.data.resize(count);
  const std::uint8_t* p = bytes.data() + body;
  for (std::size_t i = 0; i < count; ++i, p += width) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < width; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    out.data[i] = width == 4 ? std::bit_cast<float>(static_cast<std::uint32_t>(bits))
                             : static_cast<float>(std::bit_cast<double>(bits));
  }
  return out;
}

void save_npy(const std::filesystem::path& path, std::span<const float> data,
              std::span<const std::size_t> shape) {
  const auto bytes = encode_npy(data, shape);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

NpyArray load_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_npy(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace callseg
