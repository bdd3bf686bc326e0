// Copyright 2026 The kopkit Authors
//
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

#ifndef KOPKIT_ERROR_H_
#define KOPKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace kopkit {

enum class ErrorCode {
  kInvalidArgument,
  kNoFeasibleDuration,
  kNoCommonDuration,
  kMalformedLine,
  kFewerThanTwoLocations,
  kInfeasibleBudget,
  kSearchSpaceTooLarge,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is a kopkit::Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure that remembers the offending 1-based line.
class MalformedLineError : public Error {
 public:
  MalformedLineError(int line, const std::string& message)
      : Error(ErrorCode::kMalformedLine,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kNoFeasibleDuration:
      return "NoFeasibleDuration";
    case ErrorCode::kNoCommonDuration:
      return "NoCommonDuration";
    case ErrorCode::kMalformedLine:
      return "MalformedLine";
    case ErrorCode::kFewerThanTwoLocations:
      return "FewerThanTwoLocations";
    case ErrorCode::kInfeasibleBudget:
      return "InfeasibleBudget";
    case ErrorCode::kSearchSpaceTooLarge:
      return "SearchSpaceTooLarge";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

}  // namespace kopkit

#endif  // KOPKIT_ERROR_H_
