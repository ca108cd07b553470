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

#include "callseg/error.hpp"

namespace callseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kChannelCount: return "ChannelCount";
    case ErrorCode::kSampleRate: return "SampleRate";
    case ErrorCode::kFormat: return "Format";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kShape: return "Shape";
    case ErrorCode::kNumeric: return "Numeric";
    case ErrorCode::kLabel: return "Label";
    case ErrorCode::kState: return "State";
    case ErrorCode::kPrecision: return "Precision";
    case ErrorCode::kCheckpoint: return "Checkpoint";
    case ErrorCode::kSingleGender: return "SingleGender";
    case ErrorCode::kNoSpeech: return "NoSpeech";
    case ErrorCode::kSplitLeak: return "SplitLeak";
    case ErrorCode::kLayout: return "Layout";
    case ErrorCode::kData: return "Data";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kNoWindows: return "NoWindows";
    case ErrorCode::kInput: return "Input";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message),
      code_(code),
      detail_(message) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace callseg
