// Copyright 2026 The Fairloop Authors
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

#ifndef FAIRLOOP_COMMON_ERROR_H_
#define FAIRLOOP_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairloop {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kFailedPrecondition,
  kConflict,
  kUnprocessable,
  kUndefinedMetric,
  kUnavailable,
  kIo,
  kParse,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as fairloop::Error. The code drives the
// HTTP status mapping in the service and the exit code in the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message,
                              std::string detail = {}) {
  throw Error(code, message, std::move(detail));
}

// Non-fatal diagnostics accumulated by an operation. Callers that do not care
// pass nullptr.
using Warnings = std::vector<std::string>;

inline void Warn(Warnings* warnings, std::string message) {
  if (warnings != nullptr) warnings->push_back(std::move(message));
}

}  // namespace fairloop

#endif  // FAIRLOOP_COMMON_ERROR_H_
