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

#include <string>
#include <string_view>
#include <vector>

namespace callseg {

enum class Role { kCustomer = 0, kAgent = 1 };
enum class Gender { kFemale = 0, kMale = 1 };

std::string_view to_string(Role role);
std::string_view to_string(Gender gender);
Role parse_role(std::string_view s);      // throws kInput
Gender parse_gender(std::string_view s);  // throws kInput
Gender opposite(Gender g);

// Class indices: 2-class {0 customer, 1 agent}; 4-class {0 female customer,
// 1 male customer, 2 female agent, 3 male agent}.
constexpr int four_class_label(Role role, Gender gender) {
  return 2 * static_cast<int>(role) + static_cast<int>(gender);
}
constexpr int two_class_label(Role role) { return static_cast<int>(role); }
constexpr int two_class_of(int four_class) { return four_class / 2; }
constexpr Role role_of(int four_class) { return static_cast<Role>(four_class / 2); }
constexpr Gender gender_of(int four_class) { return static_cast<Gender>(four_class % 2); }

struct LabelConvention {
  int n_classes = 2;
  std::vector<std::string> names;

  static LabelConvention for_classes(int n_classes);  // 2 or 4, else kConfig

  const std::string& name(int index) const;  // throws kLabel
  int index(std::string_view name) const;    // throws kLabel
  int label_for(Role role, Gender gender) const {
    return n_classes == 4 ? four_class_label(role, gender) : two_class_label(role);
  }

  friend bool operator==(const LabelConvention&, const LabelConvention&) = default;
};

}  // namespace callseg
