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

// Reference kernels: block/stride loops over the amplitude array.

#include <cmath>

#include "q8s/statevector.hpp"

namespace q8s::kernels::serial {

void apply_h(std::span<Amplitude> amps, int target) {
  const size_t stride = size_t{1} << target;
  const double r = 1.0 / std::sqrt(2.0);
  for (size_t block = 0; block < amps.size(); block += 2 * stride) {
    for (size_t i = block; i < block + stride; ++i) {
      Amplitude x = amps[i];
      Amplitude y = amps[i + stride];
      amps[i] = (x + y) * r;
      amps[i + stride] = (x - y) * r;
    }
  }
}

void apply_x(std::span<Amplitude> amps, int target) {
  const size_t stride = size_t{1} << target;
  for (size_t block = 0; block < amps.size(); block += 2 * stride) {
    for (size_t i = block; i < block + stride; ++i) std::swap(amps[i], amps[i + stride]);
  }
}

void apply_z(std::span<Amplitude> amps, int target) {
  const size_t stride = size_t{1} << target;
  for (size_t block = 0; block < amps.size(); block += 2 * stride) {
    for (size_t i = block + stride; i < block + 2 * stride; ++i) amps[i] = -amps[i];
  }
}

void apply_cx(std::span<Amplitude> amps, int control, int target) {
  const size_t cmask = size_t{1} << control;
  const size_t tmask = size_t{1} << target;
  for (size_t i = 0; i < amps.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amps[i], amps[i | tmask]);
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  double sum = 0.0;
  for (const auto& a : amps) sum += std::norm(a);
  return sum;
}

}  // namespace q8s::kernels::serial
