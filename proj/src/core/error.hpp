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

#ifndef DISCOBOX_CORE_ERROR_HPP_
#define DISCOBOX_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace discobox {

// Every failure the engine reports. Values are stable: the C API exposes
// them one-to-one as dbx_status.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIoFailure = 2,
  kBadMagic = 3,
  kUnsupportedVersion = 4,
  kBadManifest = 5,
  kTruncatedBlob = 6,
  kOverlappingEntries = 7,
  kNonFiniteValue = 8,
  kDimMismatch = 9,
  kOutOfRange = 10,
  kMissingEntry = 11,
  kParseError = 12,
  kNonFiniteCost = 13,
  kNumericalUnderflow = 14,
  kNonFiniteBelief = 15,
  kEmptyBagSet = 16,
  kLengthMismatch = 17,
  kUnknownConfigKey = 18,
};

std::string_view ErrorCodeName(ErrorCode code);

// True for errors caused by numerics rather than malformed input.
bool IsNumericError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

inline void Require(bool condition, ErrorCode code, const char* message) {
  if (!condition) Fail(code, message);
}

}  // namespace discobox

#endif  // DISCOBOX_CORE_ERROR_HPP_
