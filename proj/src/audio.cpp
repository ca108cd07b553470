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

#include "callseg/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "callseg/error.hpp"

namespace callseg {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioBuffer AudioBuffer::slice(std::size_t begin, std::size_t count) const {
  AudioBuffer out;
  out.sample_rate = sample_rate;
  const std::size_t b = std::min(begin, samples.size());
  const std::size_t e = std::min(samples.size(), b + count);
  out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(b),
                     samples.begin() + static_cast<std::ptrdiff_t>(e));
  return out;
}

void validate(const AudioBuffer& buffer) {
  if (buffer.sample_rate <= 0) fail(ErrorCode::kInput, "sample rate must be positive");
  for (float s : buffer.samples) {
    if (!std::isfinite(s)) fail(ErrorCode::kInput, "audio contains non-finite samples");
  }
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes, int expected_rate) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail(ErrorCode::kFormat, "not a RIFF/WAVE file");
  }
  FormatChunk fmt;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) fail(ErrorCode::kFormat, "truncated fmt chunk");
      const std::uint8_t* f = chunk + 8;
      fmt.format = read_u16(f);
      fmt.channels = read_u16(f + 2);
      fmt.sample_rate = read_u32(f + 4);
      fmt.bits = read_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        if (size < 40) fail(ErrorCode::kFormat, "truncated WAVE_FORMAT_EXTENSIBLE chunk");
        // The sub-format GUID starts with the plain format tag.
        fmt.format = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Some writers leave the size at 0 or 0xFFFFFFFF when streaming.
      data_size = std::min<std::size_t>(size, available);
      if (!have_fmt) fail(ErrorCode::kFormat, "data chunk precedes fmt chunk");
      break;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) fail(ErrorCode::kFormat, "missing fmt chunk");
  if (data == nullptr) fail(ErrorCode::kFormat, "missing data chunk");
  if (fmt.channels != 1) {
    fail(ErrorCode::kChannelCount,
         "expected 1 channel, file has " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) fail(ErrorCode::kFormat, "sample rate is zero");
  if (static_cast<int>(fmt.sample_rate) != expected_rate) {
    fail(ErrorCode::kSampleRate, "expected " + std::to_string(expected_rate) +
                                     " Hz, file declares " +
                                     std::to_string(fmt.sample_rate) + " Hz");
  }

  const bool is_float = fmt.format == kFormatFloat;
  if (!(fmt.format == kFormatPcm || is_float)) {
    fail(ErrorCode::kFormat, "unsupported format tag " + std::to_string(fmt.format));
  }
  if ((is_float && fmt.bits != 32) ||
      (!is_float && fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24 && fmt.bits != 32)) {
    fail(ErrorCode::kFormat, "unsupported bit depth " + std::to_string(fmt.bits));
  }
  const std::size_t width = fmt.bits / 8;
  const std::size_t n = data_size / width;

  AudioBuffer out;
  out.sample_rate = static_cast<int>(fmt.sample_rate);
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = data + i * width;
    float v = 0.0F;
    if (is_float) {
      v = std::bit_cast<float>(read_u32(p));
      if (!std::isfinite(v)) fail(ErrorCode::kFormat, "non-finite float sample");
      v = std::clamp(v, -1.0F, 1.0F);
    } else if (width == 1) {
      v = (static_cast<float>(p[0]) - 128.0F) / 128.0F;
    } else if (width == 2) {
      v = static_cast<float>(static_cast<std::int16_t>(read_u16(p))) / 32768.0F;
    } else if (width == 3) {
      std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
      if (s & 0x800000) s -= 0x1000000;
      v = static_cast<float>(s) / 8388608.0F;
    } else {
      v = static_cast<float>(static_cast<double>(static_cast<std::int32_t>(read_u32(p))) /
                             2147483648.0);
    }
    out.samples[i] = v;
  }
  return out;
}

AudioBuffer load_audio(const std::filesystem::path& path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes, expected_rate);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavEncoding encoding,
                                     int channels) {
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t tag = encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t block = static_cast<std::uint32_t>(channels) * bits / 8;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buffer.samples.size()) * block;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * block);
  put_u16(out, static_cast<std::uint16_t>(block));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (float s : buffer.samples) {
    const float c = std::clamp(s, -1.0F, 1.0F);
    for (int ch = 0; ch < channels; ++ch) {
      if (encoding == WavEncoding::kPcm16) {
        const long q = std::lround(c * 32767.0F);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        put_u32(out, std::bit_cast<std::uint32_t>(c));
      }
    }
  }
  return out;
}

void save_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
              WavEncoding encoding) {
  const auto bytes = encode_wav(buffer, encoding);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace callseg
