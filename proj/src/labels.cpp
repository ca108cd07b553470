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

#include "callseg/labels.hpp"

#include <string>

#include "callseg/error.hpp"

namespace callseg {

std::string_view to_string(Role role) { return role == Role::kAgent ? "agent" : "customer"; }

std::string_view to_string(Gender gender) { return gender == Gender::kMale ? "male" : "female"; }

Role parse_role(std::string_view s) {
  if (s == "agent") return Role::kAgent;
  if (s == "customer") return Role::kCustomer;
  fail(ErrorCode::kInput, "unknown role '" + std::string(s) + "'");
}

Gender parse_gender(std::string_view s) {
  if (s == "female") return Gender::kFemale;
  if (s == "male") return Gender::kMale;
  fail(ErrorCode::kInput, "unknown gender '" + std::string(s) + "'");
}

Gender opposite(Gender g) { return g == Gender::kMale ? Gender::kFemale : Gender::kMale; }

LabelConvention LabelConvention::for_classes(int n_classes) {
  if (n_classes == 2) return {2, {"customer", "agent"}};
  if (n_classes == 4) return {4, {"female customer", "male customer", "female agent", "male agent"}};
  fail(ErrorCode::kConfig, "n_classes must be 2 or 4, got " + std::to_string(n_classes));
}

const std::string& LabelConvention::name(int index) const {
  if (index < 0 || index >= static_cast<int>(names.size())) {
    fail(ErrorCode::kLabel, "class index " + std::to_string(index) + " out of range");
  }
  return names[static_cast<std::size_t>(index)];
}

int LabelConvention::index(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  fail(ErrorCode::kLabel, "unknown class name '" + std::string(name) + "'");
}

}  // namespace callseg
