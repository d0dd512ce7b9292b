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

// The control-plane loop. One pass (step) does, in order:
//   1. reconcile every Active job (due retries create replacement pods,
//      terminal pods move the job forward);
//   2. one scheduling cycle;
//   3. start every bound Pending pod on its node's backend;
//   4. finish every execution whose simulated end time has been reached.
// Under a virtual clock the loop is a discrete-event simulation: when a pass
// makes no progress the clock jumps to the next due completion or retry.

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "q8s/clock.hpp"
#include "q8s/observe.hpp"
#include "q8s/remote.hpp"
#include "q8s/rng.hpp"
#include "q8s/runtime.hpp"
#include "q8s/scheduler.hpp"
#include "q8s/store.hpp"

namespace q8s {

struct ControlPlaneOptions {
  /// Empty keeps the event log in memory only.
  std::filesystem::path state_dir;
  std::filesystem::path registry;
  bool virtual_clock = false;
  uint64_t seed = 0x51c0ffee;
  /// Backs QPU nodes that declare no backend. The stub is started on
  /// `endpoint`; port 0 picks a free port.
  std::optional<RemoteQpuConfig> default_remote = RemoteQpuConfig{"127.0.0.1:0", 0, 0.0, 1, 0, 0};
  NoiseModel default_remote_noise;
  /// Wall-mode fallback period between passes.
  std::chrono::milliseconds tick{500};
  std::chrono::milliseconds remote_poll{2};
  std::chrono::milliseconds remote_timeout{30000};
};

class ControlPlane {
 public:
  explicit ControlPlane(ControlPlaneOptions opts);
  ~ControlPlane();
  ControlPlane(const ControlPlane&) = delete;
  ControlPlane& operator=(const ControlPlane&) = delete;

  ClusterStore& store() { return *store_; }
  const ClusterStore& store() const { return *store_; }
  const MetricsRegistry& metrics() const { return metrics_; }
  Clock& clock() { return *clock_; }
  bool is_virtual() const { return opts_.virtual_clock; }
  const ControlPlaneOptions& options() const { return opts_; }
  /// Endpoint of the default remote stub, empty if none runs.
  std::string default_remote_endpoint() const;

  /// Runs passes on a background thread until stop(). Under a virtual clock
  /// each wake-up runs to quiescence.
  void start();
  void stop();

  /// One pass. Returns the number of state changes it made.
  int step();

  /// Virtual mode: steps and advances the clock until nothing is pending or
  /// scheduled, or `horizon_ms` of cluster time has passed. Returns true when
  /// quiescent. Wall mode: waits up to `horizon_ms` for quiescence.
  bool run_until_quiescent(Instant horizon_ms = 24 * 3600 * kTickMs);

  /// Blocks until the job leaves Active or `timeout` passes (cluster time
  /// under a virtual clock). Returns the last observed phase.
  JobPhase wait_for_job(const std::string& job, std::chrono::milliseconds timeout);

  /// Wakes the background loop early.
  void nudge();

 private:
  struct Execution {
    std::string node;
    Instant started = 0;
    std::shared_future<ExecutionOutcome> outcome;
    /// Joins the executor thread.
    std::future<void> worker;
  };

  int reconcile_jobs(const ClusterState& state);
  int launch_bound(const ClusterState& state);
  int finish_due();
  /// Earliest cluster time at which a pass could make progress.
  std::optional<Instant> next_due();
  bool quiescent();
  void loop();

  ControlPlaneOptions opts_;
  std::unique_ptr<Clock> clock_;
  VirtualClock* vclock_ = nullptr;
  std::unique_ptr<ClusterStore> store_;
  MetricsRegistry metrics_;
  int metrics_sub_ = -1;
  int wake_sub_ = -1;
  std::unique_ptr<remote::RemoteQpuStub> stub_;
  std::optional<RemoteQpuConfig> remote_;
  Scheduler scheduler_;
  Xoshiro256 rng_;

  std::mutex step_mu_;
  std::map<std::string, Execution> running_;

  std::mutex wake_mu_;
  std::condition_variable wake_cv_;
  bool wake_ = false;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace q8s
