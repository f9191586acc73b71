// Copyright 2026 The DiscoBox Engine Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/error.hpp"

namespace discobox {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kBadManifest: return "BadManifest";
    case ErrorCode::kTruncatedBlob: return "TruncatedBlob";
    case ErrorCode::kOverlappingEntries: return "OverlappingEntries";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kMissingEntry: return "MissingEntry";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonFiniteCost: return "NonFiniteCost";
    case ErrorCode::kNumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::kNonFiniteBelief: return "NonFiniteBelief";
    case ErrorCode::kEmptyBagSet: return "EmptyBagSet";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnknownConfigKey: return "UnknownConfigKey";
  }
  return "Unknown";
}

bool IsNumericError(ErrorCode code) {
  return code == ErrorCode::kNonFiniteCost ||
         code == ErrorCode::kNumericalUnderflow ||
         code == ErrorCode::kNonFiniteBelief;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace discobox
