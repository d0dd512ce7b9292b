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

// Dense statevector execution of a Circuit and shot sampling.
//
// Sampling contract (for reimplementations): the circuit's gates are applied
// once; the probabilities |a_i|^2 are accumulated into a running sum in
// increasing basis index i. For each shot, u = rng.uniform() and the outcome
// is the first i whose running sum exceeds u * total. Measured qubits map to
// their clbits (a later measurement into the same clbit wins), unmeasured
// clbits read 0. When readout_flip_prob > 0, each measured clbit, in
// increasing clbit order, flips if rng.uniform() < readout_flip_prob. The
// bitstring places clbit k at position (num_clbits - 1 - k). The generator
// is Xoshiro256 seeded with the run's seed.

#include <cstdint>
#include <map>
#include <string>

#include "q8s/qasm.hpp"
#include "q8s/statevector.hpp"
#include "q8s/types.hpp"

namespace q8s {

struct Counts {
  std::map<std::string, int64_t> histogram;
  int64_t shots = 0;

  bool operator==(const Counts&) const = default;
};

Statevector init_state(int num_qubits);

/// Applies a non-measurement op. Throws Error("IndexOutOfRange") on bad
/// indices and Error("InvariantViolation") for MEASURE or a degenerate CX.
void apply_gate(Statevector& state, const CircuitOp& op);
Statevector apply_gate(Statevector&& state, const CircuitOp& op);

/// Applies every gate of the circuit, ignoring measurements.
Statevector evolve(const Circuit& circuit);

/// Nonzero-probability basis states; keys have one char per qubit, highest
/// qubit leftmost.
std::map<std::string, double> probabilities(const Statevector& state);

/// Throws Error("MidCircuitMeasurement") when a gate touches a qubit after it
/// was measured, Error("TooManyQubits") above the qubit cap.
Counts run_circuit(const Circuit& circuit, int64_t shots, uint64_t seed, const NoiseModel& noise = {});

}  // namespace q8s
