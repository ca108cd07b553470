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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "callseg/audio.hpp"
#include "callseg/checkpoint.hpp"
#include "callseg/cli.hpp"
#include "callseg/dataset.hpp"
#include "callseg/error.hpp"
#include "callseg/inference.hpp"
#include "callseg/mel.hpp"
#include "callseg/metrics.hpp"
#include "callseg/model.hpp"

namespace py = pybind11;
using namespace callseg;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

AudioBuffer buffer_from(const FloatArray& samples, int sample_rate) {
  if (samples.ndim() != 1) fail(ErrorCode::kShape, "audio must be a 1-D array");
  AudioBuffer b;
  b.sample_rate = sample_rate;
  b.samples.assign(samples.data(), samples.data() + samples.size());
  return b;
}

MelSpectrogram features_from(const FloatArray& a) {
  if (a.ndim() != 2) fail(ErrorCode::kShape, "features must be a 2-D (n_mels, frames) array");
  MelSpectrogram m;
  m.n_mels = static_cast<int>(a.shape(0));
  m.n_frames = static_cast<int>(a.shape(1));
  m.values.assign(a.data(), a.data() + a.size());
  return m;
}

FloatArray to_array(const MelSpectrogram& m) {
  FloatArray out({m.n_mels, m.n_frames});
  std::copy(m.values.begin(), m.values.end(), out.mutable_data());
  return out;
}

py::dict config_dict(const ModelConfig& c) {
  py::dict d;
  d["conv_filters"] = std::vector<int>(c.conv_filters.begin(), c.conv_filters.end());
  d["rnn_hidden"] = std::vector<int>(c.rnn_hidden.begin(), c.rnn_hidden.end());
  d["rnn"] = std::string(to_string(c.rnn_kind));
  d["n_classes"] = c.n_classes;
  d["input_shape"] = std::vector<int>{c.input_height, c.input_frames};
  d["dropout"] = c.dropout_p;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "call-center speaker role and gender classification";

  py::register_exception<Error>(m, "CallsegError", PyExc_RuntimeError);

  m.def(
      "load_audio",
      [](const std::filesystem::path& path, int rate) {
        auto b = load_audio(path, rate);
        return FloatArray(static_cast<py::ssize_t>(b.size()), b.samples.data());
      },
      py::arg("path"), py::arg("expected_rate") = kDefaultSampleRate);

  m.def(
      "save_wav",
      [](const std::filesystem::path& path, const FloatArray& samples, int rate) {
        save_wav(path, buffer_from(samples, rate));
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = kDefaultSampleRate);

  m.def(
      "log_mel_spectrogram",
      [](const FloatArray& samples, int rate) {
        MelConfig cfg;
        cfg.sample_rate = rate;
        return to_array(log_mel_spectrogram(buffer_from(samples, rate), cfg));
      },
      py::arg("samples"), py::arg("sample_rate") = kDefaultSampleRate);

  m.def(
      "count_params",
      [](std::array<int, 4> filters, std::array<int, 2> hidden, int n_classes, const std::string& rnn) {
        ModelConfig c;
        c.conv_filters = filters;
        c.rnn_hidden = hidden;
        c.n_classes = n_classes;
        c.rnn_kind = parse_rnn_kind(rnn);
        return count_params(c);
      },
      py::arg("conv_filters") = std::array<int, 4>{64, 64, 64, 32}, py::arg("rnn_hidden") = std::array<int, 2>{84, 84},
      py::arg("n_classes") = 2, py::arg("rnn") = "gru");

  py::class_<CrnnModel>(m, "Model")
      .def_static("load", [](const std::filesystem::path& p) { return load_checkpoint(p); })
      .def("save", [](const CrnnModel& model, const std::filesystem::path& p) { save_checkpoint(model, p); })
      .def_property_readonly("config", [](const CrnnModel& model) { return config_dict(model.config()); })
      .def_property_readonly("labels", [](const CrnnModel& model) { return model.labels().names; })
      .def_property_readonly("parameter_count", &CrnnModel::parameter_count)
      .def("predict", [](const CrnnModel& model, const FloatArray& features) {
        auto p = model.predict(features_from(features));
        return std::vector<double>(p.values().begin(), p.values().end());
      });

  m.def(
      "build_model",
      [](std::array<int, 4> filters, std::array<int, 2> hidden, int n_classes, const std::string& rnn,
         std::array<int, 2> input_shape, std::uint64_t seed) {
        ModelConfig c;
        c.conv_filters = filters;
        c.rnn_hidden = hidden;
        c.n_classes = n_classes;
        c.rnn_kind = parse_rnn_kind(rnn);
        c.input_height = input_shape[0];
        c.input_frames = input_shape[1];
        return build_crnn(c, seed);
      },
      py::arg("conv_filters") = std::array<int, 4>{64, 64, 64, 32}, py::arg("rnn_hidden") = std::array<int, 2>{84, 84},
      py::arg("n_classes") = 2, py::arg("rnn") = "gru", py::arg("input_shape") = std::array<int, 2>{96, 1000},
      py::arg("seed") = 0);

  m.def(
      "confusion",
      [](const std::vector<int>& preds, const std::vector<int>& truths, int k) {
        auto cm = confusion(preds, truths, k);
        py::array_t<std::uint64_t> out({k, k});
        std::copy(cm.counts.begin(), cm.counts.end(), out.mutable_data());
        return out;
      },
      py::arg("preds"), py::arg("truths"), py::arg("n_classes"));

  m.def(
      "class_scores",
      [](const std::vector<int>& preds, const std::vector<int>& truths, int k) {
        auto cm = confusion(preds, truths, k);
        py::list rows;
        for (const auto& s : class_scores(cm)) {
          py::dict d;
          d["precision"] = s.precision;
          d["recall"] = s.recall;
          d["f1"] = s.f1;
          rows.append(d);
        }
        return py::make_tuple(rows, accuracy(cm));
      },
      py::arg("preds"), py::arg("truths"), py::arg("n_classes"));

  m.def(
      "aggregate_speaker",
      [](const std::vector<std::vector<double>>& windows) {
        auto v = aggregate_speaker(windows);
        py::dict d;
        d["mean_probabilities"] = v.mean_probabilities;
        d["label"] = v.label;
        d["tie"] = v.tie;
        d["windows"] = v.windows;
        return d;
      },
      py::arg("window_probabilities"));

  m.def(
      "analyze_call",
      [](const std::filesystem::path& wav, const std::filesystem::path& segments, const CrnnModel& model) {
        return to_python(analyze_call(load_audio(wav), load_segments(segments), model).to_json());
      },
      py::arg("wav"), py::arg("segments"), py::arg("model"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command-line subcommand; returns (exit_code, stdout, stderr).");
}
