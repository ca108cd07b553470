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

#include "callseg/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>

#include "callseg/audio.hpp"
#include "callseg/checkpoint.hpp"
#include "callseg/corpus.hpp"
#include "callseg/csv.hpp"
#include "callseg/error.hpp"
#include "callseg/inference.hpp"
#include "callseg/json_io.hpp"
#include "callseg/mel.hpp"
#include "callseg/metrics.hpp"
#include "callseg/npy.hpp"
#include "callseg/prepare.hpp"
#include "callseg/rng.hpp"
#include "callseg/synth.hpp"
#include "callseg/trainer.hpp"

namespace callseg {
namespace fs = std::filesystem;
namespace {

void echo_config(std::ostream& err, const Json& j) { err << "effective config: " << j.dump() << "\n"; }

std::string manifest_line(const CorpusManifest& m) {
  std::string s;
  for (Split split : {Split::kTrain, Split::kValidation}) {
    s += std::string(to_string(split)) + ": " + std::to_string(m.speaker_count(split)) + " speakers, " +
         std::to_string(m.utterance_count(split)) + " utterances\n";
  }
  s += "total utterances: " + std::to_string(m.total_utterances()) + "\n";
  return s;
}

// ---- features

struct FeaturesArgs {
  std::string in, out, model;
  bool no_normalize = false;
};

int cmd_features(const FeaturesArgs& a, std::ostream& out, std::ostream& err) {
  echo_config(err, {{"command", "features"}, {"in", a.in}, {"out", a.out}, {"model", a.model},
                    {"normalize", !a.model.empty() && !a.no_normalize}});
  auto audio = load_audio(a.in);
  auto mel = log_mel_spectrogram(audio);
  if (!a.model.empty() && !a.no_normalize) load_checkpoint(a.model).normalization().apply(mel.values);
  std::size_t shape[2] = {static_cast<std::size_t>(mel.n_mels), static_cast<std::size_t>(mel.n_frames)};
  save_npy(a.out, mel.values, shape);
  out << a.out << ": (" << mel.n_mels << ", " << mel.n_frames << ")\n";
  return kExitOk;
}

// ---- prepare

struct PrepareArgs {
  std::string segments, calls, audio, out, split, report;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  double utterance_seconds = kUtteranceSeconds;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  echo_config(err, {{"command", "prepare"}, {"segments", a.segments}, {"calls", a.calls},
                    {"audio", a.audio}, {"out", a.out}, {"split", a.split},
                    {"val_fraction", a.val_fraction}, {"seed", a.seed},
                    {"utterance_seconds", a.utterance_seconds}});
  PrepareOptions opt;
  opt.segments_dir = a.segments;
  opt.audio_dir = a.audio;
  opt.out_root = a.out;
  if (!a.split.empty()) opt.split_csv = fs::path(a.split);
  opt.validation_fraction = a.val_fraction;
  opt.seed = a.seed;
  opt.utterance_seconds = a.utterance_seconds;
  auto report = prepare_corpus(load_calls(a.calls), opt);
  for (const auto& r : report.rejections) {
    err << "rejected " << r.subject << ": " << r.reason << " (" << r.detail << ")\n";
  }
  if (!a.report.empty()) write_json_file(a.report, report.to_json());
  out << report.summary();
  return kExitOk;
}

// ---- synth

SynthSpec read_synth_spec(const std::string& path) {
  SynthSpec spec;
  if (!path.empty()) from_json(read_json_file(path), spec);
  return spec;
}

struct SynthArgs {
  std::string spec, out;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = read_synth_spec(a.spec);
  Json eff = {{"command", "synth"}, {"out", a.out}, {"seed", a.seed}};
  eff["spec"] = spec;
  echo_config(err, eff);
  auto m = synth_corpus(spec, a.seed, a.out);
  out << manifest_line(m);
  return kExitOk;
}

struct SynthCallArgs {
  std::string spec, agent, customer, out_wav, out_segments, out_calls, call_id = "call";
  std::uint64_t corpus_seed = 0, seed = 0;
  double duration = 60.0;
};

SynthVoice find_voice(const SynthSpec& spec, std::uint64_t seed, const std::string& id) {
  for (Split split : {Split::kTrain, Split::kValidation}) {
    for (auto& v : synth_voices(spec, split, seed)) {
      if (v.speaker_id == id) return v;
    }
  }
  fail(ErrorCode::kInput, "speaker " + id + " is not part of the synthetic spec");
}

int cmd_synth_call(const SynthCallArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = read_synth_spec(a.spec);
  Json eff = {{"command", "synth-call"}, {"agent", a.agent}, {"customer", a.customer},
              {"corpus_seed", a.corpus_seed}, {"seed", a.seed}, {"duration", a.duration},
              {"out_wav", a.out_wav}, {"out_segments", a.out_segments}, {"call_id", a.call_id}};
  eff["spec"] = spec;
  echo_config(err, eff);
  SynthCallSpec cs;
  cs.duration = a.duration;
  cs.noise_level = spec.noise_level;
  auto call = synth_call(find_voice(spec, a.corpus_seed, a.agent), find_voice(spec, a.corpus_seed, a.customer),
                         cs, a.seed, a.call_id);
  save_wav(a.out_wav, call.audio);
  write_text_file(a.out_segments, segments_csv(call.segments));
  if (!a.out_calls.empty()) {
    call.meta.audio_path = fs::path(a.out_wav).filename().string();
    write_text_file(a.out_calls, calls_csv(std::span<const CallMetadata>(&call.meta, 1)));
  }
  out << a.out_wav << ": " << call.meta.duration << " s, " << call.segments.size() << " segments\n";
  return kExitOk;
}

// ---- train

struct TrainArgs {
  std::string corpus, config, out, history, rnn;
  std::optional<int> classes, epochs, patience, batch_size, threads;
  std::optional<double> lr, dropout;
  std::optional<std::uint64_t> seed;
  std::vector<int> filters, hidden;
  bool deterministic = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  Json file = a.config.empty() ? Json::object() : read_json_file(a.config);
  if (!file.is_object()) fail(ErrorCode::kConfig, "config file must hold a JSON object");
  ModelConfig mc;
  TrainConfig tc;
  std::string corpus = file.value("corpus", std::string());
  std::string ckpt = file.value("out", std::string());
  std::string history = file.value("history", std::string());
  bool shape_given = false;
  if (file.contains("model")) {
    from_json(file.at("model"), mc);
    shape_given = file.at("model").contains("input_shape");
  }
  if (file.contains("train")) from_json(file.at("train"), tc);

  // flags override the file
  if (!a.corpus.empty()) corpus = a.corpus;
  if (!a.out.empty()) ckpt = a.out;
  if (!a.history.empty()) history = a.history;
  if (a.classes) mc.n_classes = *a.classes;
  if (!a.rnn.empty()) mc.rnn_kind = parse_rnn_kind(a.rnn);
  if (a.dropout) mc.dropout_p = *a.dropout;
  if (!a.filters.empty()) {
    if (a.filters.size() != mc.conv_filters.size()) fail(ErrorCode::kConfig, "--filters takes 4 values");
    std::copy(a.filters.begin(), a.filters.end(), mc.conv_filters.begin());
  }
  if (!a.hidden.empty()) {
    if (a.hidden.size() != mc.rnn_hidden.size()) fail(ErrorCode::kConfig, "--hidden takes 2 values");
    std::copy(a.hidden.begin(), a.hidden.end(), mc.rnn_hidden.begin());
  }
  if (a.epochs) tc.max_epochs = *a.epochs;
  if (a.patience) tc.patience = *a.patience;
  if (a.batch_size) tc.batch_size = *a.batch_size;
  if (a.threads) tc.threads = *a.threads;
  if (a.lr) tc.learning_rate = *a.lr;
  if (a.seed) tc.seed = *a.seed;
  if (a.deterministic) tc.deterministic = true;

  if (corpus.empty()) fail(ErrorCode::kConfig, "no corpus given (--corpus or \"corpus\" in the config)");
  if (ckpt.empty()) fail(ErrorCode::kConfig, "no checkpoint path given (--out or \"out\" in the config)");
  if (history.empty()) history = fs::path(ckpt).replace_extension(".history.csv").string();

  auto items = scan_corpus(corpus, Split::kTrain);
  if (items.empty()) fail(ErrorCode::kData, "training split of " + corpus + " is empty");
  if (!shape_given) {
    auto f = load_features(items.front().path);
    mc.input_height = f.n_mels;
    mc.input_frames = f.n_frames;
  }
  mc.validate();
  tc.validate();
  echo_config(err, {{"command", "train"}, {"corpus", corpus}, {"out", ckpt}, {"history", history},
                    {"model", mc}, {"train", tc}});

  auto model = build_crnn<float>(mc, derive_seed(tc.seed, 0x6d0d));
  auto result = train(model, corpus, tc, [&](const EpochStats& s) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "epoch %d: train_loss %.6f train_acc %.4f val_loss %.6f val_acc %.4f\n",
                  s.epoch, s.train_loss, s.train_acc, s.val_loss, s.val_acc);
    err << buf << std::flush;
  });
  save_checkpoint(result.model, ckpt);
  write_text_file(history, result.history.csv());
  const auto& best = result.history.best();
  out << "best epoch " << result.history.best_epoch << " of " << result.history.epochs.size()
      << ": val_acc " << best.val_acc << "\n"
      << "checkpoint " << ckpt << "\nhistory " << history << "\n";
  return kExitOk;
}

// ---- evaluate

struct EvaluateArgs {
  std::string corpus, split = "validation", model, out_dir;
  std::optional<int> classes;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  echo_config(err, {{"command", "evaluate"}, {"corpus", a.corpus}, {"split", a.split}, {"model", a.model},
                    {"out_dir", a.out_dir}});
  auto model = load_checkpoint(a.model);
  if (a.classes && *a.classes != model.config().n_classes) {
    fail(ErrorCode::kConfig, "model has " + std::to_string(model.config().n_classes) +
                                 " classes but --classes " + std::to_string(*a.classes) + " was requested");
  }
  Split split = parse_split(a.split);
  auto ev = evaluate(model, a.corpus, split);
  auto scores = class_scores(ev.confusion);
  Json report = {{"split", a.split},
                 {"utterances", ev.confusion.total()},
                 {"loss", ev.loss},
                 {"accuracy", ev.accuracy},
                 {"confusion", to_json(ev.confusion, model.labels())},
                 {"scores", scores_json(scores, model.labels())},
                 {"confusion_csv", confusion_csv(ev.confusion)}};
  if (!a.out_dir.empty()) {
    fs::path dir = a.out_dir;
    write_json_file(dir / "report.json", report);
    write_text_file(dir / "confusion.csv", confusion_csv(ev.confusion));
    write_text_file(dir / "confusion_plot.csv", confusion_plot_csv(ev.confusion, model.labels()));
    write_text_file(dir / "scores.csv", scores_csv(scores, model.labels()));
  }
  out << report.dump(2) << "\n";
  return kExitOk;
}

// ---- analyze

struct AnalyzeArgs {
  std::string wav, segments, model, out, windows_csv;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  echo_config(err, {{"command", "analyze"}, {"wav", a.wav}, {"segments", a.segments}, {"model", a.model},
                    {"out", a.out}, {"windows_csv", a.windows_csv}});
  auto model = load_checkpoint(a.model);
  auto report = analyze_call(load_audio(a.wav), load_segments(a.segments), model);
  Json j = report.to_json();
  j["wav"] = a.wav;
  if (!a.out.empty()) write_json_file(a.out, j);
  if (!a.windows_csv.empty()) write_text_file(a.windows_csv, report.windows_csv());
  out << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"callseg: customer/agent and gender classification of call-center audio"};
  app.require_subcommand(1);

  FeaturesArgs fa;
  auto* features = app.add_subcommand("features", "log-mel features of a WAV file");
  features->add_option("--in", fa.in, "input WAV (mono, 8 kHz)")->required();
  features->add_option("--out", fa.out, "output .npy")->required();
  features->add_option("--model", fa.model, "checkpoint whose z-score is applied");
  features->add_flag("--no-normalize", fa.no_normalize, "write raw log-mel values even with --model");

  PrepareArgs pa;
  auto* prepare = app.add_subcommand("prepare", "build a corpus from annotated calls");
  prepare->add_option("--segments", pa.segments, "directory of <call_id>.csv segment files")->required();
  prepare->add_option("--calls", pa.calls, "call metadata CSV")->required();
  prepare->add_option("--audio", pa.audio, "directory the audio paths are relative to")->required();
  prepare->add_option("--out", pa.out, "corpus root")->required();
  prepare->add_option("--split", pa.split, "CSV speaker_id,split");
  prepare->add_option("--val-fraction", pa.val_fraction, "validation share of speakers without --split");
  prepare->add_option("--seed", pa.seed, "seed for the speaker split");
  prepare->add_option("--utterance-seconds", pa.utterance_seconds, "utterance length");
  prepare->add_option("--report", pa.report, "write the full report as JSON");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--spec", sa.spec, "synthetic spec JSON");
  synth->add_option("--seed", sa.seed, "seed");
  synth->add_option("--out", sa.out, "corpus root")->required();

  SynthCallArgs sca;
  auto* synth_call_cmd = app.add_subcommand("synth-call", "assemble a two-speaker call from synthetic voices");
  synth_call_cmd->add_option("--spec", sca.spec, "synthetic spec JSON the voices come from");
  synth_call_cmd->add_option("--corpus-seed", sca.corpus_seed, "seed the corpus was generated with");
  synth_call_cmd->add_option("--agent", sca.agent, "agent speaker id")->required();
  synth_call_cmd->add_option("--customer", sca.customer, "customer speaker id")->required();
  synth_call_cmd->add_option("--duration", sca.duration, "call length in seconds");
  synth_call_cmd->add_option("--seed", sca.seed, "seed of the call layout");
  synth_call_cmd->add_option("--call-id", sca.call_id, "call id");
  synth_call_cmd->add_option("--out-wav", sca.out_wav, "output WAV")->required();
  synth_call_cmd->add_option("--out-segments", sca.out_segments, "output segment CSV")->required();
  synth_call_cmd->add_option("--out-calls", sca.out_calls, "output call metadata CSV");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "train a model on a corpus");
  train_cmd->add_option("--corpus", ta.corpus, "corpus root");
  train_cmd->add_option("--config", ta.config, "JSON with model/train sections");
  train_cmd->add_option("--classes", ta.classes, "2 or 4");
  train_cmd->add_option("--rnn", ta.rnn, "gru or lstm");
  train_cmd->add_option("--out", ta.out, "checkpoint path");
  train_cmd->add_option("--history", ta.history, "history CSV path");
  train_cmd->add_option("--epochs", ta.epochs, "maximum epochs");
  train_cmd->add_option("--patience", ta.patience, "early-stopping patience");
  train_cmd->add_option("--batch-size", ta.batch_size, "batch size");
  train_cmd->add_option("--lr", ta.lr, "learning rate");
  train_cmd->add_option("--dropout", ta.dropout, "dropout probability");
  train_cmd->add_option("--filters", ta.filters, "conv filters, 4 values")->expected(4);
  train_cmd->add_option("--hidden", ta.hidden, "RNN hidden sizes, 2 values")->expected(2);
  train_cmd->add_option("--seed", ta.seed, "seed");
  train_cmd->add_option("--threads", ta.threads, "gradient threads");
  train_cmd->add_flag("--deterministic", ta.deterministic, "serial loading and single-threaded numerics");

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a checkpoint on a corpus split");
  evaluate_cmd->add_option("--corpus", ea.corpus, "corpus root")->required();
  evaluate_cmd->add_option("--split", ea.split, "train or validation");
  evaluate_cmd->add_option("--model", ea.model, "checkpoint")->required();
  evaluate_cmd->add_option("--classes", ea.classes, "expected class count");
  evaluate_cmd->add_option("--out-dir", ea.out_dir, "write report.json and CSVs here");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "per-speaker verdicts for one call");
  analyze->add_option("--wav", aa.wav, "call audio")->required();
  analyze->add_option("--segments", aa.segments, "segment CSV")->required();
  analyze->add_option("--model", aa.model, "checkpoint")->required();
  analyze->add_option("--out", aa.out, "write the report JSON here");
  analyze->add_option("--windows-csv", aa.windows_csv, "write per-window probabilities here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*features) return cmd_features(fa, out, err);
    if (*prepare) return cmd_prepare(pa, out, err);
    if (*synth) return cmd_synth(sa, out, err);
    if (*synth_call_cmd) return cmd_synth_call(sca, out, err);
    if (*train_cmd) return cmd_train(ta, out, err);
    if (*evaluate_cmd) return cmd_evaluate(ea, out, err);
    if (*analyze) return cmd_analyze(aa, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "Io error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace callseg
