// Copyright 2026 The q8s Authors
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

namespace q8s {

/// Source position, 1-based. Zero means "unknown".
struct Position {
  int line = 0;
  int column = 0;
};

/// Base class for every error the library throws. `code()` is a stable,
/// machine-readable identifier such as "UnknownField" or "DuplicateName".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// An error tied to a position in some text input (manifests, QASM).
class PositionedError : public Error {
 public:
  PositionedError(std::string code, Position pos, const std::string& message)
      : Error(std::move(code), format(pos, message)), pos_(pos), detail_(message) {}

  Position position() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(Position pos, const std::string& message) {
    if (pos.line == 0) return message;
    return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) +
           ": " + message;
  }

  Position pos_;
  std::string detail_;
};

}  // namespace q8s
