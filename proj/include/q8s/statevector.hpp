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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace q8s {

using Amplitude = std::complex<double>;

/// Gate kernels over a dense amplitude array of length 2^n. Qubit k is bit k
/// of the basis-state index. The default kernels are OpenMP-parallel above a
/// size threshold; `serial` holds the straightforward reference loops the
/// tests and the benchmark compare against.
namespace kernels {

/// Arrays shorter than this run single-threaded.
constexpr size_t kParallelThreshold = size_t{1} << 14;

void apply_h(std::span<Amplitude> amps, int target);
void apply_x(std::span<Amplitude> amps, int target);
void apply_z(std::span<Amplitude> amps, int target);
void apply_cx(std::span<Amplitude> amps, int control, int target);
double norm_squared(std::span<const Amplitude> amps);

namespace serial {
void apply_h(std::span<Amplitude> amps, int target);
void apply_x(std::span<Amplitude> amps, int target);
void apply_z(std::span<Amplitude> amps, int target);
void apply_cx(std::span<Amplitude> amps, int control, int target);
double norm_squared(std::span<const Amplitude> amps);
}  // namespace serial

}  // namespace kernels

class Statevector {
 public:
  /// |0...0> on `num_qubits` qubits; throws Error("TooManyQubits") above 24.
  explicit Statevector(int num_qubits);

  int num_qubits() const noexcept { return num_qubits_; }
  size_t size() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  const Amplitude& operator[](size_t i) const { return amps_[i]; }

  double norm() const;

 private:
  int num_qubits_;
  std::vector<Amplitude> amps_;
};

}  // namespace q8s
