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

// kubectl-like verbs over an ApiClient. Every command returns a process exit
// code: 0 success, 1 user error, 2 server or transport error, 3 job failed or
// timed out.

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "q8s/api.hpp"
#include "q8s/control_plane.hpp"

namespace q8s::cli {

namespace exit_status {
constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kServerError = 2;
constexpr int kJobFailed = 3;
}  // namespace exit_status

struct Io {
  std::ostream& out;
  std::ostream& err;
};

int cmd_apply(ApiClient& api, const std::vector<std::string>& files, Io io);
int cmd_get(ApiClient& api, const std::string& kind, bool yaml, Io io);
/// `target` is a pod name, `pods/<name>` or `jobs/<name>`; the latter means
/// the job's most recent pod.
int cmd_logs(ApiClient& api, const std::string& target, bool follow, Io io,
             std::chrono::milliseconds poll = std::chrono::milliseconds(100));
int cmd_delete(ApiClient& api, const std::string& target, Io io);
int cmd_top_nodes(ApiClient& api, Io io);

enum class Scenario { Cpu, Gpu, Qpu };
std::optional<Scenario> parse_scenario(const std::string& text);

struct DemoOptions {
  Scenario scenario = Scenario::Cpu;
  int64_t shots = 1024;
  std::optional<uint64_t> seed;
  std::chrono::milliseconds timeout{60000};
};

/// The scenario's job: the paper's quantum job for qpu, the same job with
/// its QPU request swapped for `nvidia.com/gpu: 1` for gpu, and with no
/// requests for cpu. Shots and seed travel as task args.
JobSpec demo_job(const DemoOptions& opts, const std::string& name);

int cmd_demo(ApiClient& api, const DemoOptions& opts, Io io,
             std::chrono::milliseconds poll = std::chrono::milliseconds(10));

struct DemoTopology {
  bool cpu = true;
  bool gpu = true;
  bool qpu = true;
};

/// Writes the Bell bundle into the registry and registers the cpu, gpu and
/// qpu nodes that are missing. Safe to repeat.
void install_demo_topology(ControlPlane& cp, DemoTopology topology = {});

/// The quantum node and quantum job manifests exactly as the paper prints them.
extern const char* const kPaperNodeManifest;
extern const char* const kPaperJobManifest;
extern const char* const kPaperPodManifest;

/// Full command line entry point.
int run(int argc, char** argv, Io io);

}  // namespace q8s::cli
