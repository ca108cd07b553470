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

#include "callseg/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "callseg/error.hpp"
#include "callseg/json_io.hpp"

namespace callseg {

namespace {

constexpr char kMagic[8] = {'C', 'S', 'E', 'G', 'C', 'K', 'P', 'T'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void corrupt(const std::string& what) { fail(ErrorCode::kCheckpoint, what); }

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const CrnnModel& model) {
  Json params = Json::array();
  const auto names = model.parameter_names();
  std::size_t n_values = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    params.push_back({{"name", names[i]}, {"shape", model.parameters()[i].shape()}});
    n_values += model.parameters()[i].size();
  }
  const Json header{{"format", "callseg-checkpoint"},
                    {"version", kCheckpointVersion},
                    {"config", model.config()},
                    {"labels", model.labels()},
                    {"normalization", model.normalization()},
                    {"parameters", params}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(8 + 8 + text.size() + 8 + n_values * 4 + 4);
  out.insert(out.end(), kMagic, kMagic + 8);
  put_le(out, kCheckpointVersion, 4);
  put_le(out, text.size(), 4);
  out.insert(out.end(), text.begin(), text.end());
  put_le(out, n_values * 4, 8);
  const std::size_t body = out.size();
  for (const auto& p : model.parameters()) {
    for (float v : p.values()) put_le(out, std::bit_cast<std::uint32_t>(v), 4);
  }
  put_le(out, crc32_of(out.data() + body, out.size() - body), 4);
  return out;
}

CrnnModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) corrupt("not a callseg checkpoint");
  const auto version = static_cast<std::uint32_t>(get_le(bytes.data() + 8, 4));
  if (version != kCheckpointVersion) {
    corrupt("unsupported checkpoint version " + std::to_string(version));
  }
  const std::size_t header_len = get_le(bytes.data() + 12, 4);
  std::size_t pos = 16;
  if (bytes.size() < pos + header_len + 8) corrupt("truncated checkpoint header");
  Json header;
  try {
    header = Json::parse(std::string(reinterpret_cast<const char*>(bytes.data() + pos), header_len));
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("malformed checkpoint header: ") + e.what());
  }
  pos += header_len;
  const std::size_t n_bytes = get_le(bytes.data() + pos, 8);
  pos += 8;
  if (n_bytes % 4 != 0 || bytes.size() - pos < n_bytes + 4) corrupt("truncated checkpoint parameters");
  if (bytes.size() - pos != n_bytes + 4) corrupt("trailing bytes after checkpoint");
  const std::uint8_t* body = bytes.data() + pos;
  const auto stored_crc = static_cast<std::uint32_t>(get_le(body + n_bytes, 4));
  if (crc32_of(body, n_bytes) != stored_crc) corrupt("parameter checksum mismatch");

  ModelConfig config;
  FeatureNormalization normalization;
  std::vector<Tensor> params;
  try {
    from_json(header.at("config"), config);
    config.validate();
    from_json(header.at("normalization"), normalization);
    const auto labels = header.at("labels").get<std::vector<std::string>>();
    if (labels != LabelConvention::for_classes(config.n_classes).names) {
      corrupt("label convention does not match class count");
    }
    std::size_t offset = 0;
    for (const auto& entry : header.at("parameters")) {
      const auto shape = entry.at("shape").get<Shape>();
      const std::size_t n = shape_size(shape);
      if ((offset + n) * 4 > n_bytes) corrupt("parameter table exceeds stored data");
      std::vector<float> data(n);
      for (std::size_t i = 0; i < n; ++i) {
        data[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(body + (offset + i) * 4, 4)));
      }
      offset += n;
      params.emplace_back(shape, std::move(data));
    }
    if (offset * 4 != n_bytes) corrupt("parameter table does not cover stored data");
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("malformed checkpoint header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCheckpoint) throw;
    corrupt(e.detail());
  }
  try {
    return CrnnModel(config, std::move(params), normalization);
  } catch (const Error& e) {
    corrupt(e.detail());
  }
}

void save_checkpoint(const CrnnModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(model);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

CrnnModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace callseg
