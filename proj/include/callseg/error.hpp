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

#include <stdexcept>
#include <string>
#include <string_view>

namespace callseg {

// Every failure raised by the library carries one of these codes. The CLI
// maps them onto exit codes; bindings map them onto Python exceptions.
enum class ErrorCode {
  kChannelCount,
  kSampleRate,
  kFormat,
  kConfig,
  kTooShort,
  kShape,
  kNumeric,
  kLabel,
  kState,
  kPrecision,
  kCheckpoint,
  kSingleGender,
  kNoSpeech,
  kSplitLeak,
  kLayout,
  kData,
  kDivergence,
  kNoWindows,
  kInput,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // Message without the "<Code> error: " prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace callseg
