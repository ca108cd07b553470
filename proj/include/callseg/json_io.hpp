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

#include "json.hpp"

#include "callseg/labels.hpp"
#include "callseg/mel.hpp"
#include "callseg/model.hpp"

namespace callseg {

using Json = nlohmann::json;

// from_json overlays: keys absent from the document keep their current value.
void to_json(Json& j, const PoolKernel& k);
void from_json(const Json& j, PoolKernel& k);
void to_json(Json& j, const ModelConfig& c);
void from_json(const Json& j, ModelConfig& c);
void to_json(Json& j, const FeatureNormalization& n);
void from_json(const Json& j, FeatureNormalization& n);
void to_json(Json& j, const LabelConvention& l);

Json read_json_file(const std::filesystem::path& path);  // throws kIo / kFormat

// Writes `j` with 2-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace callseg
