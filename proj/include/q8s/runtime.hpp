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

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "q8s/bundle.hpp"
#include "q8s/rng.hpp"
#include "q8s/store.hpp"
#include "q8s/types.hpp"

namespace q8s {

namespace exit_code {
constexpr int kOk = 0;
constexpr int kBundleError = 2;
constexpr int kCircuitError = 3;
constexpr int kRemoteUnavailable = 4;
constexpr int kRemoteRejected = 5;
}  // namespace exit_code

struct ExecutionOutcome {
  int exit_code = exit_code::kOk;
  /// On success the last line is the JSON result document.
  std::vector<std::string> logs;
  std::optional<nlohmann::ordered_json> result;
  /// Simulated run time on the cluster clock.
  Instant duration_ms = 0;
  int64_t shots = 0;

  bool ok() const { return exit_code == exit_code::kOk; }
};

struct ExecutionContext {
  std::filesystem::path registry;
  std::chrono::milliseconds remote_poll{2};
  std::chrono::milliseconds remote_timeout{30000};
};

/// The node's declared backend, or one inferred from its capacity:
/// a `*/qpu` key means remote-qpu, `nvidia.com/gpu` means gpu-sim, else cpu-sim.
BackendBinding effective_backend(const NodeSpec& node, const std::optional<RemoteQpuConfig>& default_remote = {});

/// ceil((gates * 1 ms + shots * 0.01 ms) / speed_factor).
Instant simulated_duration_ms(const Circuit& circuit, int64_t shots, double speed_factor);

/// Never throws for task-level problems; they become a nonzero exit code and
/// a diagnostic log line. Draws exactly one value from `rng` per call.
ExecutionOutcome execute_pod(const PodSpec& pod, const BackendBinding& backend, const ExecutionContext& ctx,
                             Xoshiro256& rng);

/// Log lines of a pod in seq order. Errors: UnknownPod.
std::vector<LogRecord> collect_logs(const std::string& pod, const ClusterStore& store, int64_t since_seq = -1);

}  // namespace q8s
