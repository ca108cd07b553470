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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any of them fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "callseg/audio.hpp"
#include "callseg/checkpoint.hpp"
#include "callseg/cli.hpp"
#include "callseg/corpus.hpp"
#include "callseg/csv.hpp"
#include "callseg/dataset.hpp"
#include "callseg/gradcheck.hpp"
#include "callseg/inference.hpp"
#include "callseg/json_io.hpp"
#include "callseg/mel.hpp"
#include "callseg/metrics.hpp"
#include "callseg/model.hpp"
#include "callseg/npy.hpp"
#include "callseg/prepare.hpp"
#include "callseg/synth.hpp"
#include "callseg/trainer.hpp"
#include "support.hpp"

using namespace callseg;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t id_hash(const std::string& id) { return fnv1a(std::vector<std::uint8_t>(id.begin(), id.end())); }

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (code != 0) std::cerr << "  cli failed (" << code << "): " << err.str();
  return code;
}

// ---------------------------------------------------------------------------
// 1. shapes

Outcome shapes(const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path wav = work / "shape" / "tone.wav";
  save_wav(wav, testing::sine(80000, 440.0, 0.3));
  auto features = log_mel_spectrogram(load_audio(wav));
  auto model = build_crnn(ModelConfig{}, 1);
  auto tr = model.forward_trace(model.prepare_input(features), false, nullptr);
  const double dt = seconds_since(t0);
  const auto& c = tr.conv_features;
  const bool ok = features.n_mels == 96 && features.n_frames == 1000 && c.shape() == Shape{32, 1, 42} &&
                  tr.sequence.shape() == Shape{42, 32} && dt < 1.0;
  return {ok, "features (" + std::to_string(features.n_mels) + "," + std::to_string(features.n_frames) +
                  "), conv (" + std::to_string(c.dim(0)) + "," + std::to_string(c.dim(2)) + "), " +
                  fmt("%.3f s", dt)};
}

// 2. head parameter law

Outcome head_law() {
  std::string detail;
  bool ok = true;
  for (RnnKind kind : {RnnKind::kGru, RnnKind::kLstm}) {
    ModelConfig two;
    two.rnn_kind = kind;
    ModelConfig four = two;
    four.n_classes = 4;
    const auto a = count_params(two), b = count_params(four);
    ok = ok && b - a == 170;
    detail += std::string(to_string(kind)) + " " + std::to_string(a) + " -> " + std::to_string(b) + "; ";
  }
  return {ok, detail};
}

// 3. gradients

Outcome gradients() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (RnnKind kind : {RnnKind::kGru, RnnKind::kLstm}) {
    ModelConfig c;
    c.conv_filters = {2, 2, 2, 2};
    c.rnn_hidden = {3, 3};
    c.rnn_kind = kind;
    c.n_classes = 4;
    c.input_frames = 24;
    c.dropout_p = 0.0;
    auto model = build_crnn<double>(c, 314);
    Rng rng(15);
    Tensor64 x({1, 96, 24});
    for (auto& v : x.values()) v = rng.normal();
    for (int label = 0; label < 4; ++label) {
      worst = std::max(worst, gradient_check(model, x, label).max_relative_error);
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-4 && dt < 120.0, "max relative error " + fmt("%.3g", worst) + ", " + fmt("%.2f s", dt)};
}

// 4. synthetic accuracy

SynthSpec accuracy_spec() {
  SynthSpec s;
  s.train = {{6, 6, 6, 6}, {20, 20, 20, 20}};
  s.validation = {{2, 2, 2, 2}, {20, 20, 20, 20}};
  s.utterance_seconds = 2.5;
  return s;
}

constexpr std::uint64_t kCorpusSeed = 2024;

struct AccuracyState {
  fs::path corpus;
  std::map<RnnKind, fs::path> checkpoints;
};

Outcome synthetic_accuracy(const fs::path& work, AccuracyState& state) {
  const auto t0 = Clock::now();
  state.corpus = work / "synthetic";
  fs::remove_all(state.corpus);
  auto manifest = synth_corpus(accuracy_spec(), kCorpusSeed, state.corpus);
  std::string detail = std::to_string(manifest.speaker_count(Split::kTrain)) + "/" +
                       std::to_string(manifest.speaker_count(Split::kValidation)) + " speakers; ";
  bool ok = manifest.speaker_count(Split::kTrain) == 24 && manifest.speaker_count(Split::kValidation) == 8;
  for (RnnKind kind : {RnnKind::kGru, RnnKind::kLstm}) {
    ModelConfig mc;
    mc.conv_filters = {8, 8, 8, 8};
    mc.rnn_hidden = {16, 16};
    mc.rnn_kind = kind;
    mc.n_classes = 4;
    mc.input_frames = 250;
    TrainConfig tc;
    tc.max_epochs = 50;
    tc.patience = 10;
    tc.seed = 17;
    tc.deterministic = true;
    auto res = train(build_crnn(mc, derive_seed(17, 0x6d0d)), state.corpus, tc, [&](const EpochStats& e) {
      std::cerr << "  " << to_string(kind) << " epoch " << e.epoch << " train_loss " << fmt("%.4f", e.train_loss)
                << " val_acc " << fmt("%.4f", e.val_acc) << "\n";
    });
    const auto& best = res.history.best();
    ok = ok && best.val_acc >= 0.95 && res.history.best_epoch <= 50;
    detail += std::string(to_string(kind)) + " val_acc " + fmt("%.4f", best.val_acc) + " at epoch " +
              std::to_string(res.history.best_epoch) + "; ";
    state.checkpoints[kind] = work / ("synthetic_" + std::string(to_string(kind)) + ".ckpt");
    save_checkpoint(res.model, state.checkpoints[kind]);
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 20 * 60.0;
  return {ok, detail + fmt("%.1f s", dt)};
}

// 5. metrics oracle

Outcome metrics_oracle() {
  const auto t0 = Clock::now();
  Rng rng(5150);
  double worst = 0.0;
  bool counts_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = trial % 2 == 0 ? 2 : 4;
    const std::size_t n = rng.index(201);
    std::vector<int> p(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
      t[i] = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
    }
    auto scores = class_scores(confusion(p, t, k));
    for (int c = 0; c < k; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += p[i] == c && t[i] == c;
        fp += p[i] == c && t[i] != c;
        fn += p[i] != c && t[i] == c;
      }
      const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
      const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
      const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      const auto& s = scores[static_cast<std::size_t>(c)];
      worst = std::max({worst, std::abs(s.precision - prec), std::abs(s.recall - rec), std::abs(s.f1 - f1)});
      counts_ok = counts_ok && std::isfinite(s.f1);
    }
  }
  const double dt = seconds_since(t0);
  return {counts_ok && worst <= 1e-12 && dt < 10.0, "max deviation " + fmt("%.3g", worst) + ", " + fmt("%.3f s", dt)};
}

// 6. aggregation

Outcome aggregation() {
  double worst = 0.0;
  bool ok = true;
  std::vector<std::vector<double>> w{{0.2, 0.3, 0.4, 0.1}, {0.1, 0.1, 0.7, 0.1}, {0.6, 0.2, 0.1, 0.1}};
  const std::vector<double> hand{0.9 / 3, 0.6 / 3, 1.2 / 3, 0.3 / 3};
  auto v = aggregate_speaker(w);
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(v.mean_probabilities[i] - hand[i]));
  ok = ok && v.label == 2 && !v.tie;

  std::vector<std::vector<double>> pair{{1.0, 0.0}, {0.0, 1.0}};
  auto t = aggregate_speaker(pair);
  worst = std::max({worst, std::abs(t.mean_probabilities[0] - 0.5), std::abs(t.mean_probabilities[1] - 0.5)});
  ok = ok && t.tie && t.label == 0;

  std::vector<std::vector<double>> one{{0.05, 0.15, 0.25, 0.55}};
  auto s = aggregate_speaker(one);
  ok = ok && s.mean_probabilities == one[0] && s.label == 3;

  std::vector<std::vector<double>> sample{{3.05e-8, 8.89e-2, 9.11e-1, 4.66e-11}};
  auto g = aggregate_speaker(sample);
  const auto labels = LabelConvention::for_classes(4);
  ok = ok && g.label == 2 && labels.name(g.label) == "female agent" && worst <= 1e-12;
  return {ok, "max mean deviation " + fmt("%.3g", worst) + ", sample label " + std::to_string(g.label) + " (" +
                  labels.name(g.label) + ")"};
}

// 7. DBAS golden fixture

struct FixtureCall {
  std::string id, agent, customer;
  Gender agent_gender;
  double duration;
  std::vector<SegmentAnnotation> segments;
};

std::vector<FixtureCall> fixture_calls() {
  using L = SegmentLabel;
  const auto F = L::kSpeechFemale, M = L::kSpeechMale, S = L::kSilence, N = L::kNoise, U = L::kMusic;
  return {
      {"call_short", "agent_s", "cust_s", Gender::kFemale, 45, {{0, 20, F}, {20, 45, M}}},
      {"call_long", "agent_l", "cust_l", Gender::kMale, 601, {{0, 300, M}, {300, 601, F}}},
      {"call_single_gender", "agent_g", "cust_g", Gender::kFemale, 80, {{0, 40, F}, {40, 45, S}, {45, 80, F}}},
      {"call_no_speech", "agent_n", "cust_n", Gender::kMale, 70, {{0, 30, U}, {30, 70, N}}},
      {"call_inconsistent", "agent_m2", "cust_m1", Gender::kMale, 75, {{0, 35, M}, {35, 75, F}}},
      {"call_valid_f", "agent_f1", "cust_m1", Gender::kFemale, 90,
       {{0, 25, F}, {25, 26, S}, {26, 47, M}, {47, 48, N}, {48, 70, F}, {70, 90, M}}},
      {"call_valid_m", "agent_m1", "cust_f1", Gender::kMale, 120,
       {{0, 30, M}, {30, 35, U}, {35, 70, F}, {70, 95, M}, {95, 120, F}}},
      {"call_boundary", "agent_f2", "cust_m2", Gender::kFemale, 60, {{0, 20, F}, {20, 42, M}, {42, 52, F}, {52, 60, M}}},
  };
}

AudioBuffer fixture_audio(const FixtureCall& call, std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(call.duration * kDefaultSampleRate);
  AudioBuffer audio;
  audio.samples.assign(n, 0.0f);
  if (call.id == "call_long") return audio;  // rejected before the audio is read
  const int agent_class = four_class_label(Role::kAgent, call.agent_gender);
  const int customer_class = four_class_label(Role::kCustomer, opposite(call.agent_gender));
  auto agent = make_voice(call.agent, agent_class, derive_seed(seed, id_hash(call.agent)));
  auto customer =
      make_voice(call.customer, customer_class, derive_seed(seed, id_hash(call.customer)));
  Rng rng(derive_seed(seed, 0xca11));
  std::uint64_t take = 0;
  for (const auto& s : call.segments) {
    const auto b = static_cast<std::size_t>(s.start * kDefaultSampleRate);
    const auto e = static_cast<std::size_t>(s.end * kDefaultSampleRate);
    auto g = speech_gender(s.label);
    if (g) {
      const auto& v = *g == call.agent_gender ? agent : customer;
      auto part = synthesize(v, e - b, take++);
      std::copy(part.samples.begin(), part.samples.end(), audio.samples.begin() + static_cast<std::ptrdiff_t>(b));
    } else if (s.label == SegmentLabel::kNoise) {
      for (std::size_t i = b; i < e; ++i) audio.samples[i] = static_cast<float>(0.05 * rng.normal());
    } else if (s.label == SegmentLabel::kMusic) {
      for (std::size_t i = b; i < e; ++i) {
        const double tt = static_cast<double>(i) / kDefaultSampleRate;
        audio.samples[i] = static_cast<float>(0.1 * std::sin(2 * std::numbers::pi * 523.25 * tt) + 0.1 * std::sin(2 * std::numbers::pi * 659.25 * tt));
      }
    }
  }
  return audio;
}

void write_fixture(const fs::path& dir) {
  std::vector<CallMetadata> meta;
  for (const auto& c : fixture_calls()) {
    save_wav(dir / "audio" / (c.id + ".wav"), fixture_audio(c, 99));
    write_text_file(dir / "segments" / (c.id + ".csv"), segments_csv(c.segments));
    meta.push_back({c.id, c.agent, c.agent_gender, c.duration, c.customer, c.id + ".wav"});
  }
  write_text_file(dir / "calls.csv", calls_csv(meta));
  write_text_file(dir / "split.csv",
                  "speaker_id,split\n"
                  "agent_f1,train\nagent_m1,train\ncust_f1,train\nagent_f2,train\ncust_m1,train\n"
                  "cust_m2,validation\nagent_m2,validation\n");
}

Outcome dbas_fixture(const fs::path& work) {
  const fs::path dir = work / "dbas";
  fs::remove_all(dir);
  write_fixture(dir / "input");

  // Hand-derived expectation: speech seconds per retained speaker, floor(/10)
  // utterances each; cust_m1 is labeled male in one call and female in another.
  const std::vector<std::pair<std::string, int>> expected_speakers{
      {"train/agent/female/agent_f1", 4},  {"train/agent/male/agent_m1", 5},
      {"train/customer/female/cust_f1", 6}, {"train/agent/female/agent_f2", 3},
      {"validation/customer/male/cust_m2", 3}, {"validation/agent/male/agent_m2", 3}};
  std::set<std::string> expected_files{"manifest.json"};
  for (const auto& [prefix, n] : expected_speakers)
    for (int j = 0; j < n; ++j) expected_files.insert(prefix + "/" + std::to_string(j) + ".npy");
  const std::map<std::string, std::string> expected_rejections{{"call_short", "duration"},
                                                               {"call_long", "duration"},
                                                               {"call_single_gender", "single_gender"},
                                                               {"call_no_speech", "no_speech"},
                                                               {"cust_m1", "inconsistent_speaker"}};

  std::vector<std::map<std::string, std::vector<std::uint8_t>>> trees;
  std::string detail;
  bool ok = true;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("corpus" + std::to_string(run));
    std::vector<std::string> args{"prepare",
                                  "--segments", (dir / "input/segments").string(),
                                  "--calls", (dir / "input/calls.csv").string(),
                                  "--audio", (dir / "input/audio").string(),
                                  "--out", out.string(),
                                  "--split", (dir / "input/split.csv").string(),
                                  "--report", (dir / ("report" + std::to_string(run) + ".json")).string()};
    if (cli(args) != 0) return {false, "prepare failed"};
    trees.push_back(testing::snapshot(out));
  }
  std::set<std::string> got;
  for (const auto& [rel, bytes] : trees[0]) got.insert(rel);
  const bool tree_ok = got == expected_files;
  const bool identical = trees[0] == trees[1];

  auto report = read_json_file(dir / "report0.json");
  std::map<std::string, std::string> rejections;
  for (const auto& r : report["rejections"]) rejections[r["subject"].get<std::string>()] = r["reason"].get<std::string>();
  const bool rejections_ok = rejections == expected_rejections;

  auto manifest = CorpusManifest::from_json(read_json_file(dir / "corpus0/manifest.json"));
  const bool manifest_ok = manifest.utterance_count(Split::kTrain) == 18 &&
                           manifest.utterance_count(Split::kValidation) == 6 &&
                           manifest.speaker_count(Split::kTrain) == 4 &&
                           manifest.speaker_count(Split::kValidation) == 2 &&
                           manifest == manifest_from_disk(dir / "corpus0");

  // agent_f1 utterance 1 is seconds [10, 20) of its first segment
  auto audio = load_audio(dir / "input/audio/call_valid_f.wav");
  auto direct = log_mel_spectrogram(audio.slice(80000, 80000));
  auto stored = load_npy(dir / "corpus0/train/agent/female/agent_f1/1.npy");
  const bool features_ok = stored.shape == std::vector<std::size_t>{96, 1000} && stored.data == direct.values;

  ok = tree_ok && identical && rejections_ok && manifest_ok && features_ok;
  detail = std::to_string(got.size() - 1) + " utterances (expected " + std::to_string(expected_files.size() - 1) +
           "), tree " + (tree_ok ? "ok" : "MISMATCH") + ", rejections " + (rejections_ok ? "ok" : "MISMATCH") +
           ", manifest " + (manifest_ok ? "ok" : "MISMATCH") + ", features " + (features_ok ? "ok" : "MISMATCH") +
           ", reruns " + (identical ? "byte-identical" : "DIFFER");
  if (!tree_ok) {
    for (const auto& f : got)
      if (!expected_files.count(f)) std::cerr << "  unexpected " << f << "\n";
    for (const auto& f : expected_files)
      if (!got.count(f)) std::cerr << "  missing " << f << "\n";
  }
  if (!rejections_ok)
    for (const auto& [s, r] : rejections) std::cerr << "  rejection " << s << ": " << r << "\n";
  return {ok, detail};
}

// 8. determinism

Outcome determinism(const fs::path& work, const AccuracyState& state) {
  const fs::path dir = work / "determinism";
  fs::remove_all(dir);
  std::vector<std::string> sums;
  std::vector<std::uint64_t> hist, ckpt;
  for (int run = 0; run < 2; ++run) {
    const fs::path model = dir / ("run" + std::to_string(run)) / "model.ckpt";
    const fs::path history = dir / ("run" + std::to_string(run)) / "history.csv";
    std::vector<std::string> args{"train", "--corpus", state.corpus.string(), "--classes", "4", "--rnn", "lstm",
                                  "--filters", "8", "8", "8", "8", "--hidden", "16", "16", "--epochs", "3",
                                  "--seed", "77", "--deterministic", "--out", model.string(), "--history",
                                  history.string()};
    if (cli(args) != 0) return {false, "train failed"};
    hist.push_back(fnv1a(testing::read_bytes(history)));
    ckpt.push_back(fnv1a(testing::read_bytes(model)));
  }
  const bool ok = hist[0] == hist[1] && ckpt[0] == ckpt[1];
  return {ok, "history " + hex(hist[0]) + "/" + hex(hist[1]) + ", checkpoint " + hex(ckpt[0]) + "/" + hex(ckpt[1])};
}

// 9. end-to-end analyze

Outcome end_to_end(const fs::path& work, const AccuracyState& state) {
  const fs::path dir = work / "analyze";
  fs::remove_all(dir);
  const fs::path spec = dir / "spec.json";
  Json spec_json;
  to_json(spec_json, accuracy_spec());
  write_json_file(spec, spec_json);
  struct Case {
    std::string agent, customer;
    int agent_label, customer_label;
  };
  // held-out (validation) voices: class 2 female agent with class 1 male
  // customer, and class 3 male agent with class 0 female customer
  const std::vector<Case> cases{{synth_speaker_id(Split::kValidation, 2, 0), synth_speaker_id(Split::kValidation, 1, 1), 2, 1},
                                {synth_speaker_id(Split::kValidation, 3, 1), synth_speaker_id(Split::kValidation, 0, 0), 3, 0}};
  bool ok = true;
  std::string detail;
  int n = 0;
  for (const auto& c : cases) {
    const fs::path wav = dir / ("call" + std::to_string(n) + ".wav");
    const fs::path segs = dir / ("call" + std::to_string(n) + ".csv");
    const fs::path out = dir / ("call" + std::to_string(n) + ".json");
    if (cli({"synth-call", "--spec", spec.string(), "--corpus-seed", std::to_string(kCorpusSeed), "--agent", c.agent,
             "--customer", c.customer, "--duration", "60", "--seed", std::to_string(900 + n), "--out-wav",
             wav.string(), "--out-segments", segs.string()}) != 0)
      return {false, "synth-call failed"};
    const auto t1 = Clock::now();
    if (cli({"analyze", "--wav", wav.string(), "--segments", segs.string(), "--model",
             state.checkpoints.at(RnnKind::kGru).string(), "--out", out.string()}) != 0)
      return {false, "analyze failed"};
    const double dt = seconds_since(t1);
    auto report = read_json_file(out);
    std::map<std::string, int> by_gender;
    for (const auto& s : report["speakers"]) {
      if (s["status"] != "ok") continue;
      by_gender[s["gender"].get<std::string>()] = s["label"].get<int>();
    }
    const std::string agent_gender(to_string(gender_of(c.agent_label)));
    const std::string customer_gender(to_string(gender_of(c.customer_label)));
    const bool hit = by_gender.count(agent_gender) && by_gender.count(customer_gender) &&
                     by_gender[agent_gender] == c.agent_label && by_gender[customer_gender] == c.customer_label;
    ok = ok && hit && dt < 60.0;
    detail += "call " + std::to_string(n) + ": agent " + std::to_string(by_gender.count(agent_gender) ? by_gender[agent_gender] : -1) +
              "/" + std::to_string(c.agent_label) + ", customer " +
              std::to_string(by_gender.count(customer_gender) ? by_gender[customer_gender] : -1) + "/" +
              std::to_string(c.customer_label) + " in " + fmt("%.2f s", dt) + "; ";
    ++n;
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string work = (fs::temp_directory_path() / "callseg_acceptance").string();
  std::vector<int> only;
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "criteria to run (4 is implied by 8 and 9)");
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(work);
  auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };

  AccuracyState state;
  const std::vector<std::pair<int, std::string>> names{
      {1, "shape reproduction"},     {2, "parameter-head law"},  {3, "gradient correctness"},
      {4, "synthetic accuracy"},     {5, "metrics oracle"},      {6, "aggregation semantics"},
      {7, "DBAS golden fixture"},    {8, "training determinism"}, {9, "end-to-end analyze"}};
  const std::map<int, std::function<Outcome()>> checks{
      {1, [&] { return shapes(work); }},
      {2, [&] { return head_law(); }},
      {3, [&] { return gradients(); }},
      {4, [&] { return synthetic_accuracy(work, state); }},
      {5, [&] { return metrics_oracle(); }},
      {6, [&] { return aggregation(); }},
      {7, [&] { return dbas_fixture(work); }},
      {8, [&] { return determinism(work, state); }},
      {9, [&] { return end_to_end(work, state); }}};

  const bool need_corpus = wanted(4) || wanted(8) || wanted(9);
  int failures = 0;
  for (const auto& [k, name] : names) {
    if (!wanted(k) && !(k == 4 && need_corpus)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = checks.at(k)();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << k << " " << (o.pass ? "PASS" : "FAIL") << " " << name << ": " << o.detail << " ["
              << fmt("%.2f", seconds_since(t0)) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
