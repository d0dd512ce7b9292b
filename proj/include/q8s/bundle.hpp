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

// Task bundles stand in for container images. An image reference
// `[host/]path/name:tag` resolves to `<registry>/<name>/<tag>/task.yaml`:
//
//   circuit: bell.qasm     # relative to the bundle directory
//   shots: 1024            # optional, default 1024
//   seed: 7                # optional; absent means a fresh seed per run
//
// A bundle holding several tasks nests them under `entries:`, keyed by the
// pod's command[0].

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "q8s/qasm.hpp"

namespace q8s {

constexpr int64_t kDefaultShots = 1024;

struct ImageRef {
  std::string name;
  std::string tag;

  bool operator==(const ImageRef&) const = default;
};

/// Throws ImageNotFound when the reference has no `name:tag` form.
ImageRef parse_image_ref(std::string_view image);

struct TaskBundle {
  ImageRef image;
  std::string entry;
  Circuit circuit;
  int64_t shots = kDefaultShots;
  std::optional<uint64_t> seed;
};

/// Errors: ImageNotFound, InvalidBundle.
TaskBundle resolve_bundle(std::string_view image, const std::filesystem::path& registry,
                          const std::vector<std::string>& command = {});

struct RunOverrides {
  std::optional<int64_t> shots;
  std::optional<uint64_t> seed;
};

/// Accepts `--shots N` and `--seed N` (also `--shots=N`). Errors: InvalidArgs.
RunOverrides parse_run_args(const std::vector<std::string>& args);

/// Writes `<registry>/<name>/<tag>/{task.yaml,<circuit_file>}`.
void write_bundle(const std::filesystem::path& registry, const ImageRef& image, const std::string& qasm,
                  int64_t shots, std::optional<uint64_t> seed, const std::string& circuit_file = "circuit.qasm");

/// The Bell program: H on q[0], CX q[0]->q[1], both qubits measured.
extern const char* const kBellQasm;

}  // namespace q8s
