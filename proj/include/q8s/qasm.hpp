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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "q8s/error.hpp"

namespace q8s {

constexpr int kMaxQubits = 24;

enum class OpKind { H, X, Z, CX, Measure };

std::string_view to_string(OpKind kind);

struct CircuitOp {
  OpKind kind = OpKind::H;
  std::vector<int> qubits;
  std::optional<int> clbit;

  static CircuitOp h(int q) { return {OpKind::H, {q}, std::nullopt}; }
  static CircuitOp x(int q) { return {OpKind::X, {q}, std::nullopt}; }
  static CircuitOp z(int q) { return {OpKind::Z, {q}, std::nullopt}; }
  static CircuitOp cx(int control, int target) { return {OpKind::CX, {control, target}, std::nullopt}; }
  static CircuitOp measure(int q, int c) { return {OpKind::Measure, {q}, c}; }

  bool operator==(const CircuitOp&) const = default;
};

/// Gate-level program over one quantum and one classical register.
struct Circuit {
  int num_qubits = 1;
  int num_clbits = 0;
  std::vector<CircuitOp> ops;

  /// Number of non-measurement operations.
  size_t gate_count() const;

  /// Throws Error("InvariantViolation"/"IndexOutOfRange") on a malformed circuit.
  void validate() const;

  bool operator==(const Circuit&) const = default;
};

/// Parses the OpenQASM 2.0 subset: one qreg, at most one creg, gates
/// h/x/z/cx and `measure q[i] -> c[j]`. Errors are PositionedError with
/// code() "SyntaxError", "UnsupportedStatement", "IndexOutOfRange" or
/// "InvariantViolation".
Circuit parse_qasm(std::string_view text);

/// Canonical source: header, `qreg q[n];`, `creg c[m];` (when m > 0), one
/// statement per line.
std::string unparse_qasm(const Circuit& circuit);

}  // namespace q8s
