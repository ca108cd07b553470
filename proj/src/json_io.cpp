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

#include "callseg/json_io.hpp"

#include <fstream>

#include "callseg/error.hpp"

namespace callseg {

namespace {

template <typename V>
void overlay(const Json& j, const char* key, V& value) {
  if (j.contains(key)) j.at(key).get_to(value);
}

}  // namespace

void to_json(Json& j, const PoolKernel& k) { j = Json::array({k.rows, k.cols}); }

void from_json(const Json& j, PoolKernel& k) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::kConfig, "pool kernel must be [rows, cols]");
  k.rows = j[0].get<int>();
  k.cols = j[1].get<int>();
}

void to_json(Json& j, const ModelConfig& c) {
  j = Json{{"conv_filters", c.conv_filters},
           {"pool_kernels", c.pool_kernels},
           {"dropout_p", c.dropout_p},
           {"rnn_kind", to_string(c.rnn_kind)},
           {"rnn_hidden", c.rnn_hidden},
           {"n_classes", c.n_classes},
           {"input_shape", {c.input_height, c.input_frames}},
           {"conv_activation", c.conv_activation == Activation::kElu ? "elu" : "linear"}};
}

void from_json(const Json& j, ModelConfig& c) {
  try {
    overlay(j, "conv_filters", c.conv_filters);
    overlay(j, "pool_kernels", c.pool_kernels);
    overlay(j, "dropout_p", c.dropout_p);
    if (j.contains("rnn_kind")) c.rnn_kind = parse_rnn_kind(j.at("rnn_kind").get<std::string>());
    overlay(j, "rnn_hidden", c.rnn_hidden);
    overlay(j, "n_classes", c.n_classes);
    if (j.contains("input_shape")) {
      const auto& s = j.at("input_shape");
      if (!s.is_array() || s.size() != 2) fail(ErrorCode::kConfig, "input_shape must be [mels, frames]");
      c.input_height = s[0].get<int>();
      c.input_frames = s[1].get<int>();
    }
    if (j.contains("conv_activation")) {
      const auto a = j.at("conv_activation").get<std::string>();
      if (a == "elu") {
        c.conv_activation = Activation::kElu;
      } else if (a == "linear") {
        c.conv_activation = Activation::kLinear;
      } else {
        fail(ErrorCode::kConfig, "conv_activation must be elu or linear");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("model config: ") + e.what());
  }
}

void to_json(Json& j, const FeatureNormalization& n) {
  j = Json{{"enabled", n.enabled}, {"mean", n.mean}, {"stddev", n.stddev}};
}

void from_json(const Json& j, FeatureNormalization& n) {
  overlay(j, "enabled", n.enabled);
  overlay(j, "mean", n.mean);
  overlay(j, "stddev", n.stddev);
}

void to_json(Json& j, const LabelConvention& l) { j = l.names; }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace callseg
