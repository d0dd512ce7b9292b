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

#include "q8s/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "q8s/error.hpp"
#include "q8s/rng.hpp"

namespace q8s {

Statevector::Statevector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw Error("TooManyQubits", "statevector supports 1 to " + std::to_string(kMaxQubits) + " qubits, got " +
                                     std::to_string(num_qubits));
  }
  amps_.assign(size_t{1} << num_qubits, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

double Statevector::norm() const { return std::sqrt(kernels::norm_squared(amps_)); }

Statevector init_state(int num_qubits) { return Statevector(num_qubits); }

void apply_gate(Statevector& state, const CircuitOp& op) {
  size_t arity = op.kind == OpKind::CX ? 2 : 1;
  if (op.kind == OpKind::Measure) throw Error("InvariantViolation", "apply_gate cannot apply a measurement");
  if (op.qubits.size() != arity) throw Error("InvariantViolation", "wrong number of qubits for gate");
  for (int q : op.qubits) {
    if (q < 0 || q >= state.num_qubits()) {
      throw Error("IndexOutOfRange", "qubit " + std::to_string(q) + " out of range for " +
                                         std::to_string(state.num_qubits()) + "-qubit state");
    }
  }
  auto amps = state.amplitudes();
  switch (op.kind) {
    case OpKind::H: kernels::apply_h(amps, op.qubits[0]); break;
    case OpKind::X: kernels::apply_x(amps, op.qubits[0]); break;
    case OpKind::Z: kernels::apply_z(amps, op.qubits[0]); break;
    case OpKind::CX:
      if (op.qubits[0] == op.qubits[1]) throw Error("InvariantViolation", "CX qubits must be distinct");
      kernels::apply_cx(amps, op.qubits[0], op.qubits[1]);
      break;
    case OpKind::Measure: break;
  }
}

Statevector apply_gate(Statevector&& state, const CircuitOp& op) {
  apply_gate(state, op);
  return std::move(state);
}

Statevector evolve(const Circuit& circuit) {
  Statevector state(circuit.num_qubits);
  for (const auto& op : circuit.ops) {
    if (op.kind != OpKind::Measure) apply_gate(state, op);
  }
  return state;
}

std::map<std::string, double> probabilities(const Statevector& state) {
  std::map<std::string, double> out;
  const int n = state.num_qubits();
  for (size_t i = 0; i < state.size(); ++i) {
    double p = std::norm(state[i]);
    if (p == 0.0) continue;
    std::string key(static_cast<size_t>(n), '0');
    for (int q = 0; q < n; ++q) {
      if ((i >> q) & 1) key[static_cast<size_t>(n - 1 - q)] = '1';
    }
    out[key] = p;
  }
  return out;
}

namespace {

void reject_mid_circuit_measurement(const Circuit& circuit) {
  std::vector<bool> measured(static_cast<size_t>(circuit.num_qubits), false);
  for (const auto& op : circuit.ops) {
    if (op.kind == OpKind::Measure) {
      measured[static_cast<size_t>(op.qubits[0])] = true;
      continue;
    }
    for (int q : op.qubits) {
      if (measured[static_cast<size_t>(q)]) {
        throw Error("MidCircuitMeasurement", "qubit " + std::to_string(q) + " is used by " +
                                                 std::string(to_string(op.kind)) + " after being measured");
      }
    }
  }
}

}  // namespace

Counts run_circuit(const Circuit& circuit, int64_t shots, uint64_t seed, const NoiseModel& noise) {
  if (circuit.num_qubits > kMaxQubits) {
    throw Error("TooManyQubits", "circuit uses " + std::to_string(circuit.num_qubits) + " qubits; the cap is " +
                                     std::to_string(kMaxQubits));
  }
  if (shots < 1) throw Error("InvariantViolation", "shots must be at least 1");
  if (!(noise.readout_flip_prob >= 0.0 && noise.readout_flip_prob <= 1.0)) {
    throw Error("InvariantViolation", "readout flip probability must be within [0, 1]");
  }
  circuit.validate();
  reject_mid_circuit_measurement(circuit);

  Statevector state = evolve(circuit);

  std::vector<double> cumulative(state.size());
  double running = 0.0;
  for (size_t i = 0; i < state.size(); ++i) {
    running += std::norm(state[i]);
    cumulative[i] = running;
  }
  const double total = running;

  // clbit -> measured qubit; a later measurement of the same clbit wins.
  const auto m = static_cast<size_t>(circuit.num_clbits);
  std::vector<int> source(m, -1);
  for (const auto& op : circuit.ops) {
    if (op.kind == OpKind::Measure) source[static_cast<size_t>(*op.clbit)] = op.qubits[0];
  }

  Xoshiro256 rng(seed);
  Counts counts;
  counts.shots = shots;
  std::string bits(m, '0');
  for (int64_t shot = 0; shot < shots; ++shot) {
    double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    size_t outcome = it == cumulative.end() ? cumulative.size() - 1 : static_cast<size_t>(it - cumulative.begin());
    for (size_t k = 0; k < m; ++k) {
      bool bit = false;
      if (source[k] >= 0) {
        bit = (outcome >> source[k]) & 1;
        if (noise.readout_flip_prob > 0.0 && rng.uniform() < noise.readout_flip_prob) bit = !bit;
      }
      bits[m - 1 - k] = bit ? '1' : '0';
    }
    ++counts.histogram[bits];
  }
  return counts;
}

}  // namespace q8s
