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

// Each kernel enumerates the amplitude pairs a gate mixes by inserting zero
// bits into a compact loop counter, so every iteration is independent and
// the loop parallelizes with a plain `omp parallel for`.

#include <cmath>
#include <cstdint>

#include "q8s/statevector.hpp"

namespace q8s::kernels {

namespace {

// Inserts a zero bit at position `bit` of `k`.
inline uint64_t insert_zero(uint64_t k, int bit) {
  uint64_t low = k & ((uint64_t{1} << bit) - 1);
  return ((k >> bit) << (bit + 1)) | low;
}

}  // namespace

void apply_h(std::span<Amplitude> amps, int target) {
  const int64_t half = static_cast<int64_t>(amps.size() / 2);
  const uint64_t mask = uint64_t{1} << target;
  const double r = 1.0 / std::sqrt(2.0);
  Amplitude* a = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
  for (int64_t k = 0; k < half; ++k) {
    uint64_t i = insert_zero(static_cast<uint64_t>(k), target);
    uint64_t j = i | mask;
    Amplitude x = a[i];
    Amplitude y = a[j];
    a[i] = (x + y) * r;
    a[j] = (x - y) * r;
  }
}

void apply_x(std::span<Amplitude> amps, int target) {
  const int64_t half = static_cast<int64_t>(amps.size() / 2);
  const uint64_t mask = uint64_t{1} << target;
  Amplitude* a = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
  for (int64_t k = 0; k < half; ++k) {
    uint64_t i = insert_zero(static_cast<uint64_t>(k), target);
    std::swap(a[i], a[i | mask]);
  }
}

void apply_z(std::span<Amplitude> amps, int target) {
  const int64_t half = static_cast<int64_t>(amps.size() / 2);
  const uint64_t mask = uint64_t{1} << target;
  Amplitude* a = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
  for (int64_t k = 0; k < half; ++k) {
    uint64_t j = insert_zero(static_cast<uint64_t>(k), target) | mask;
    a[j] = -a[j];
  }
}

void apply_cx(std::span<Amplitude> amps, int control, int target) {
  const int64_t quarter = static_cast<int64_t>(amps.size() / 4);
  const uint64_t cmask = uint64_t{1} << control;
  const uint64_t tmask = uint64_t{1} << target;
  const int lo = control < target ? control : target;
  const int hi = control < target ? target : control;
  Amplitude* a = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
  for (int64_t k = 0; k < quarter; ++k) {
    uint64_t i = insert_zero(insert_zero(static_cast<uint64_t>(k), lo), hi) | cmask;
    std::swap(a[i], a[i | tmask]);
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  const int64_t n = static_cast<int64_t>(amps.size());
  const Amplitude* a = amps.data();
  double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum) if (amps.size() >= kParallelThreshold)
  for (int64_t i = 0; i < n; ++i) sum += std::norm(a[i]);
  return sum;
}

}  // namespace q8s::kernels
