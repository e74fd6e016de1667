// Copyright 2026 The Anchored GDA Authors
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

#ifndef AGDA_ERRORS_H_
#define AGDA_ERRORS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace agda {

// Failure categories. The CLI maps each category onto an exit code.
enum class ErrorKind {
  kUsage,         // Precondition or configuration violation.
  kDomain,        // Non-finite or otherwise invalid numeric input.
  kNumeric,       // Iterative method failed or produced a non-finite value.
  kDivergence,    // Iterates left the representable range.
  kData,          // Trace or report content missing or malformed.
  kInapplicable,  // Operation is undefined for this schedule or problem.
  kUnsupported,   // Schedule variant does not support the operation.
  kIo,            // File could not be opened or written.
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the solver. Carries the iteration index at which the update
// failed and, when known, the offending coordinate.
class NumericError : public Error {
 public:
  NumericError(ErrorKind kind, const std::string& message, int64_t t,
               std::optional<int64_t> coordinate = std::nullopt)
      : Error(kind, message), t_(t), coordinate_(coordinate) {}

  int64_t t() const { return t_; }
  std::optional<int64_t> coordinate() const { return coordinate_; }

 private:
  int64_t t_;
  std::optional<int64_t> coordinate_;
};

// Parse failure with the 1-based line number of the offending input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int64_t line)
      : Error(ErrorKind::kData,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int64_t line() const { return line_; }

 private:
  int64_t line_;
};

}  // namespace agda

#endif  // AGDA_ERRORS_H_
