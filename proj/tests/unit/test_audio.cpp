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

#include <doctest.h>

#include <cstring>

#include "callseg/audio.hpp"
#include "support.hpp"

using namespace callseg;
using testing::error_code_of;

namespace {

// Hand-built RIFF image, independent of encode_wav.
std::vector<std::uint8_t> wav_bytes(std::uint16_t tag, std::uint16_t channels, std::uint32_t rate,
                                    std::uint16_t bits, const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> b;
  auto u16 = [&](std::uint16_t v) { b.push_back(v & 0xFF); b.push_back(v >> 8); };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF); };
  auto tagw = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  tagw("RIFF");
  u32(36 + static_cast<std::uint32_t>(data.size()));
  tagw("WAVE");
  tagw("fmt ");
  u32(16);
  u16(tag);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  tagw("data");
  u32(static_cast<std::uint32_t>(data.size()));
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

}  // namespace

TEST_SUITE("audio") {
  TEST_CASE("one second of silence decodes to 8000 zeros") {
    auto bytes = wav_bytes(1, 1, 8000, 16, std::vector<std::uint8_t>(16000, 0));
    auto a = decode_wav(bytes, 8000);
    CHECK(a.sample_rate == 8000);
    REQUIRE(a.size() == 8000);
    for (float s : a.samples) CHECK(s == 0.0f);
  }

  TEST_CASE("ten second 16-bit file has 80000 samples") {
    testing::TempDir dir;
    AudioBuffer b = testing::sine(80000, 440.0);
    save_wav(dir / "x.wav", b);
    auto a = load_audio(dir / "x.wav");
    CHECK(a.size() == 80000);
    CHECK(a.duration() == doctest::Approx(10.0));
    for (std::size_t i = 0; i < a.size(); i += 997) CHECK(std::abs(a.samples[i] - b.samples[i]) < 1e-4f);
  }

  TEST_CASE("bit depths are normalized to [-1, 1]") {
    // 8-bit unsigned: 0 -> -1, 128 -> 0, 255 -> 127/128
    auto a8 = decode_wav(wav_bytes(1, 1, 8000, 8, {0, 128, 255}), 8000);
    CHECK(a8.samples == std::vector<float>{-1.0f, 0.0f, 127.0f / 128.0f});
    // 24-bit: 0x800000 -> -1, 0x400000 -> 0.5
    auto a24 = decode_wav(wav_bytes(1, 1, 8000, 24, {0x00, 0x00, 0x80, 0x00, 0x00, 0x40}), 8000);
    CHECK(a24.samples == std::vector<float>{-1.0f, 0.5f});
    // 32-bit int: 0xC0000000 -> -0.5
    auto a32 = decode_wav(wav_bytes(1, 1, 8000, 32, {0x00, 0x00, 0x00, 0xC0}), 8000);
    CHECK(a32.samples[0] == -0.5f);
    // 32-bit float passes through
    float f = 0.25f;
    std::vector<std::uint8_t> raw(4);
    std::memcpy(raw.data(), &f, 4);
    CHECK(decode_wav(wav_bytes(3, 1, 8000, 32, raw), 8000).samples[0] == 0.25f);
  }

  TEST_CASE("float encoding round-trips exactly") {
    AudioBuffer b = testing::sine(1234, 300.0, 0.7);
    auto a = decode_wav(encode_wav(b, WavEncoding::kFloat32), 8000);
    CHECK(a.samples == b.samples);
  }

  TEST_CASE("stereo is rejected with ChannelCount") {
    AudioBuffer b = testing::sine(100, 300.0);
    CHECK(error_code_of([&] { decode_wav(encode_wav(b, WavEncoding::kPcm16, 2), 8000); }) ==
          ErrorCode::kChannelCount);
  }

  TEST_CASE("rate mismatch is rejected with SampleRate") {
    AudioBuffer b = testing::sine(100, 300.0, 0.5, 16000);
    CHECK(error_code_of([&] { decode_wav(encode_wav(b), 8000); }) == ErrorCode::kSampleRate);
  }

  TEST_CASE("malformed headers are Format errors") {
    std::vector<std::uint8_t> junk(64, 7);
    CHECK(error_code_of([&] { decode_wav(junk, 8000); }) == ErrorCode::kFormat);
    auto good = encode_wav(testing::sine(10, 300.0));
    good.resize(30);  // cut inside fmt
    CHECK(error_code_of([&] { decode_wav(good, 8000); }) == ErrorCode::kFormat);
    CHECK(error_code_of([&] { decode_wav(wav_bytes(1, 1, 8000, 12, {0, 0}), 8000); }) == ErrorCode::kFormat);
  }

  TEST_CASE("missing file names the path") {
    try {
      load_audio("/nonexistent/call.wav");
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIo);
      CHECK(std::string(e.what()).find("/nonexistent/call.wav") != std::string::npos);
    }
  }

  TEST_CASE("validate rejects non-finite samples") {
    AudioBuffer b;
    b.samples = {0.0f, std::nanf("")};
    CHECK(error_code_of([&] { validate(b); }) == ErrorCode::kInput);
  }
}
