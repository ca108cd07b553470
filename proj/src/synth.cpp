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

#include "callseg/synth.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "callseg/error.hpp"
#include "callseg/rng.hpp"

namespace callseg {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBandEdge = 3800.0;  // keep harmonics clear of Nyquist
constexpr int kMaxHarmonics = 48;

std::array<int, 4> read_counts(const Json& j, const char* key, std::array<int, 4> current) {
  if (!j.contains(key)) return current;
  const auto& v = j.at(key);
  if (v.is_number_integer()) {
    int n = v.get<int>();
    return {n, n, n, n};
  }
  if (v.is_array() && v.size() == 4) return v.get<std::array<int, 4>>();
  fail(ErrorCode::kConfig, std::string("synth spec: '") + key + "' must be an integer or 4 integers");
}

void read_split(const Json& j, const char* key, SynthSplitSpec& s) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  s.speakers = read_counts(v, "speakers_per_class", s.speakers);
  s.utterances = read_counts(v, "utterances_per_speaker", s.utterances);
}

// Customer on/off gate, smoothed by a one-pole filter (about 10 ms).
std::vector<double> gate_envelope(Rng& rng, std::size_t n, int rate) {
  std::vector<double> env(n);
  bool on = rng.uniform() < 0.5;
  double remaining = on ? rng.uniform(0.5, 1.5) : rng.uniform(0.3, 0.8);
  remaining *= rng.uniform();  // start part-way through a run
  const double dt = 1.0 / rate;
  const double alpha = 1.0 - std::exp(-dt / 0.01);
  double y = on ? 1.0 : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    while (remaining <= 0.0) {
      on = !on;
      remaining += on ? rng.uniform(0.5, 1.5) : rng.uniform(0.3, 0.8);
    }
    y += alpha * ((on ? 1.0 : 0.0) - y);
    env[i] = y;
    remaining -= dt;
  }
  return env;
}

}  // namespace

SynthVoice make_voice(std::string speaker_id, int class_label, std::uint64_t seed, double noise_level) {
  if (class_label < 0 || class_label > 3) fail(ErrorCode::kLabel, "voice class must be a 4-class label");
  Rng rng(derive_seed(seed, 0x701ce));
  SynthVoice v;
  v.speaker_id = std::move(speaker_id);
  v.class_label = class_label;
  v.seed = seed;
  bool male = gender_of(class_label) == Gender::kMale;
  // leave room for per-take jitter inside the band
  v.f0 = male ? rng.uniform(kMaleF0Min + 8, kMaleF0Max - 8) : rng.uniform(kFemaleF0Min + 8, kFemaleF0Max - 8);
  v.tilt = rng.uniform(0.7, 1.3);
  v.harmonic_gain.resize(kMaxHarmonics);
  for (auto& g : v.harmonic_gain) g = rng.uniform(0.6, 1.4);
  v.vibrato_hz = rng.uniform(3.0, 6.0);
  v.vibrato_depth = rng.uniform(0.005, 0.02);
  v.am_hz = rng.uniform(5.0, 7.0);
  v.am_depth = rng.uniform(0.5, 0.7);
  v.noise_level = noise_level;
  return v;
}

AudioBuffer synthesize(const SynthVoice& voice, std::size_t n_samples, std::uint64_t take, int sample_rate) {
  Rng rng(derive_seed(voice.seed, 0x7a5e, take));
  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.resize(n_samples);

  double f0 = voice.f0 * (1.0 + rng.uniform(-0.03, 0.03));
  double vib_phase = rng.uniform(0.0, kTwoPi);
  double am_phase = rng.uniform(0.0, kTwoPi);
  double drift_phase = rng.uniform(0.0, kTwoPi);
  double phase = rng.uniform(0.0, kTwoPi);
  std::vector<double> gate;
  bool agent = voice.role() == Role::kAgent;
  if (!agent) gate = gate_envelope(rng, n_samples, sample_rate);

  int n_harm = std::min<int>(kMaxHarmonics, static_cast<int>(kBandEdge / (f0 * (1.0 + 2 * voice.vibrato_depth))));
  std::vector<double> gains(static_cast<std::size_t>(n_harm));
  double norm = 0.0;
  for (int h = 1; h <= n_harm; ++h) {
    gains[h - 1] = std::pow(h, -voice.tilt) * voice.harmonic_gain[static_cast<std::size_t>(h - 1)];
    norm += gains[h - 1] * gains[h - 1];
  }
  norm = 1.0 / std::sqrt(std::max(norm, 1e-12));

  const double dt = 1.0 / sample_rate;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double t = static_cast<double>(i) * dt;
    double inst = f0 * (1.0 + voice.vibrato_depth * std::sin(kTwoPi * voice.vibrato_hz * t + vib_phase));
    phase = std::fmod(phase + kTwoPi * inst * dt, kTwoPi);
    // harmonic sum via powers of the unit phasor
    std::complex<double> z = std::polar(1.0, phase), p = z;
    double acc = 0.0;
    for (int h = 0; h < n_harm; ++h) {
      acc += gains[static_cast<std::size_t>(h)] * p.imag();
      p *= z;
    }
    double env;
    if (agent) {
      env = 1.0 - voice.am_depth * (0.5 + 0.5 * std::sin(kTwoPi * voice.am_hz * t + am_phase));
    } else {
      env = gate[i] * (0.85 + 0.15 * std::sin(kTwoPi * 1.3 * t + drift_phase));
    }
    out.samples[i] = static_cast<float>(0.3 * env * acc * norm + voice.noise_level * rng.normal());
  }
  return out;
}

void from_json(const Json& j, SynthSpec& spec) {
  if (!j.is_object()) fail(ErrorCode::kConfig, "synth spec must be a JSON object");
  try {
    if (j.contains("utterance_seconds")) spec.utterance_seconds = j.at("utterance_seconds").get<double>();
    if (j.contains("noise_level")) spec.noise_level = j.at("noise_level").get<double>();
    read_split(j, "train", spec.train);
    read_split(j, "validation", spec.validation);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kConfig, std::string("synth spec: ") + e.what());
  }
  if (!(spec.utterance_seconds > 0.0)) fail(ErrorCode::kConfig, "utterance_seconds must be positive");
  if (!(spec.noise_level >= 0.0)) fail(ErrorCode::kConfig, "noise_level must be non-negative");
  for (const auto* s : {&spec.train, &spec.validation}) {
    for (int c = 0; c < 4; ++c) {
      if (s->speakers[c] < 0 || s->utterances[c] < 0) fail(ErrorCode::kConfig, "synth counts must be >= 0");
    }
  }
}

void to_json(Json& j, const SynthSpec& spec) {
  auto split = [](const SynthSplitSpec& s) {
    return Json{{"speakers_per_class", s.speakers}, {"utterances_per_speaker", s.utterances}};
  };
  j = {{"utterance_seconds", spec.utterance_seconds},
       {"noise_level", spec.noise_level},
       {"train", split(spec.train)},
       {"validation", split(spec.validation)}};
}

std::string synth_speaker_id(Split split, int class_label, int index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_c%d_s%02d", split == Split::kTrain ? "train" : "val", class_label, index);
  return buf;
}

std::vector<SynthVoice> synth_voices(const SynthSpec& spec, Split split, std::uint64_t seed) {
  const auto& s = split == Split::kTrain ? spec.train : spec.validation;
  std::vector<SynthVoice> voices;
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < s.speakers[c]; ++i) {
      auto vseed = derive_seed(seed, static_cast<std::uint64_t>(split) * 8 + c, static_cast<std::uint64_t>(i));
      voices.push_back(make_voice(synth_speaker_id(split, c, i), c, vseed, spec.noise_level));
    }
  }
  return voices;
}

CorpusManifest synth_corpus(const SynthSpec& spec, std::uint64_t seed, const std::filesystem::path& root,
                            const MelConfig& mel) {
  auto len = static_cast<std::size_t>(std::llround(spec.utterance_seconds * mel.sample_rate));
  std::vector<Utterance> utterances;
  SplitAssignment assignment;
  for (Split split : {Split::kTrain, Split::kValidation}) {
    const auto& counts = split == Split::kTrain ? spec.train : spec.validation;
    for (const auto& voice : synth_voices(spec, split, seed)) {
      assignment.emplace_back(voice.speaker_id, split);
      for (int j = 0; j < counts.utterances[voice.class_label]; ++j) {
        auto audio = synthesize(voice, len, static_cast<std::uint64_t>(j), mel.sample_rate);
        utterances.push_back({voice.speaker_id, voice.class_label, j, {}, log_mel_spectrogram(audio, mel)});
      }
    }
  }
  return write_corpus(utterances, assignment, root, mel);
}

SynthCall synth_call(const SynthVoice& agent, const SynthVoice& customer, const SynthCallSpec& spec,
                     std::uint64_t seed, const std::string& call_id) {
  const int rate = kDefaultSampleRate;
  if (!(spec.duration > 0.0) || !(spec.turn_min > 0.0) || spec.turn_max < spec.turn_min ||
      !(spec.gap_min > 0.0) || spec.gap_max < spec.gap_min) {
    fail(ErrorCode::kConfig, "invalid synthetic call timing");
  }
  Rng rng(derive_seed(seed, 0xca11));
  auto n = static_cast<std::size_t>(std::llround(spec.duration * rate));
  auto agent_audio = synthesize(agent, n, derive_seed(seed, 1), rate);
  auto customer_audio = synthesize(customer, n, derive_seed(seed, 2), rate);

  SynthCall call;
  call.audio.sample_rate = rate;
  call.audio.samples.resize(n);
  std::size_t pos = 0;
  bool agent_turn = true;
  bool gap_next = true;
  while (pos < n) {
    std::size_t len;
    SegmentLabel label;
    if (gap_next) {
      len = static_cast<std::size_t>(std::llround(rng.uniform(spec.gap_min, spec.gap_max) * rate));
      static constexpr SegmentLabel kGaps[] = {SegmentLabel::kSilence, SegmentLabel::kNoise, SegmentLabel::kMusic};
      label = kGaps[rng.index(3)];
    } else {
      len = static_cast<std::size_t>(std::llround(rng.uniform(spec.turn_min, spec.turn_max) * rate));
      label = speech_label((agent_turn ? agent : customer).gender());
    }
    len = std::max<std::size_t>(1, std::min(len, n - pos));
    for (std::size_t i = pos; i < pos + len; ++i) {
      double t = static_cast<double>(i) / rate;
      double v;
      switch (label) {
        case SegmentLabel::kSilence: v = spec.noise_level * 0.3 * rng.normal(); break;
        case SegmentLabel::kNoise: v = 0.08 * rng.normal(); break;
        case SegmentLabel::kMusic:
          v = 0.08 * (std::sin(kTwoPi * 440.0 * t) + std::sin(kTwoPi * 554.37 * t) + std::sin(kTwoPi * 659.25 * t));
          break;
        default: v = (agent_turn ? agent_audio : customer_audio).samples[i];
      }
      call.audio.samples[i] = static_cast<float>(v);
    }
    call.segments.push_back({static_cast<double>(pos) / rate, static_cast<double>(pos + len) / rate, label});
    pos += len;
    if (!gap_next) agent_turn = !agent_turn;
    gap_next = !gap_next;
  }

  call.meta.call_id = call_id;
  call.meta.agent_id = agent.speaker_id;
  call.meta.agent_gender = agent.gender();
  call.meta.customer_id = customer.speaker_id;
  call.meta.duration = static_cast<double>(n) / rate;
  call.meta.audio_path = call_id + ".wav";
  return call;
}

}  // namespace callseg
