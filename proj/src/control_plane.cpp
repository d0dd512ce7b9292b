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

#include "q8s/control_plane.hpp"

#include <algorithm>

#include "q8s/error.hpp"

namespace q8s {

namespace {

std::unique_ptr<ClusterStore> open_store(Clock& clock, const std::filesystem::path& dir) {
  if (dir.empty()) return std::make_unique<ClusterStore>(clock);
  return std::make_unique<ClusterStore>(clock, dir);
}

bool pod_terminal(const PodSpec& pod) { return is_terminal(pod.status->phase); }

}  // namespace

ControlPlane::ControlPlane(ControlPlaneOptions opts)
    : opts_(std::move(opts)),
      clock_(opts_.virtual_clock ? std::unique_ptr<Clock>(std::make_unique<VirtualClock>(0))
                                 : std::unique_ptr<Clock>(std::make_unique<WallClock>())),
      vclock_(opts_.virtual_clock ? static_cast<VirtualClock*>(clock_.get()) : nullptr),
      store_(open_store(*clock_, opts_.state_dir)),
      scheduler_(*store_),
      rng_(opts_.seed) {
  if (vclock_) {
    const auto events = store_->events();
    if (!events.empty()) vclock_->advance_to(events.back().timestamp);
  }
  metrics_sub_ = store_->subscribe([this](const EventRecord& ev) { metrics_.record(ev); });
  wake_sub_ = store_->subscribe([this](const EventRecord& ev) {
    if (ev.kind == EventKind::LogAppended || ev.kind == EventKind::MetricSample) return;
    nudge();
  });
  if (opts_.default_remote) {
    stub_ = std::make_unique<remote::RemoteQpuStub>(*opts_.default_remote, opts_.default_remote_noise);
    stub_->start();
    remote_ = opts_.default_remote;
    remote_->endpoint = stub_->endpoint();
  }
  store_->fail_orphans();
}

ControlPlane::~ControlPlane() {
  stop();
  std::lock_guard lock(step_mu_);
  for (auto& [pod, exec] : running_) exec.worker.wait();
  running_.clear();
  store_->unsubscribe(wake_sub_);
  store_->unsubscribe(metrics_sub_);
  if (stub_) stub_->stop();
}

std::string ControlPlane::default_remote_endpoint() const { return remote_ ? remote_->endpoint : ""; }

void ControlPlane::nudge() {
  {
    std::lock_guard lock(wake_mu_);
    wake_ = true;
  }
  wake_cv_.notify_all();
}

void ControlPlane::start() {
  if (thread_.joinable()) return;
  {
    std::lock_guard lock(wake_mu_);
    stopping_ = false;
  }
  thread_ = std::thread([this] { loop(); });
}

void ControlPlane::stop() {
  {
    std::lock_guard lock(wake_mu_);
    stopping_ = true;
  }
  wake_cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void ControlPlane::loop() {
  for (;;) {
    {
      std::lock_guard lock(wake_mu_);
      if (stopping_) return;
      wake_ = false;
    }
    if (vclock_) {
      run_until_quiescent();
    } else {
      step();
    }
    auto wait = opts_.tick;
    if (auto due = next_due(); due && !vclock_) {
      auto until = std::chrono::milliseconds(std::max<Instant>(0, *due - clock_->now()));
      wait = std::min(wait, until);
    }
    std::unique_lock lock(wake_mu_);
    wake_cv_.wait_for(lock, wait, [this] { return wake_ || stopping_; });
  }
}

int ControlPlane::reconcile_jobs(const ClusterState& state) {
  int changes = 0;
  const Instant now = clock_->now();
  for (const auto& [name, job] : state.jobs) {
    const JobStatus& st = *job.status;
    if (st.phase != JobPhase::Active) continue;
    bool due = false;
    if (st.retry_at) {
      due = now >= *st.retry_at;
    } else if (auto pod = state.pods.find(st.active_pod); pod != state.pods.end()) {
      due = pod_terminal(pod->second);
    }
    if (!due) continue;
    try {
      if (store_->reconcile_job(name) != st) ++changes;
    } catch (const Error&) {
      // Deleted between snapshot and command.
    }
  }
  return changes;
}

int ControlPlane::launch_bound(const ClusterState& state) {
  int launched = 0;
  for (const auto& [name, pod] : state.pods) {
    if (pod.status->phase != PodPhase::Pending || pod.status->node_name.empty() || running_.count(name)) continue;
    const NodeSpec& node = state.nodes.at(pod.status->node_name);
    const BackendBinding backend = effective_backend(node, remote_);
    try {
      store_->transition_pod(name, PodPhase::Running);
      store_->append_log(name, "started on node " + node.meta.name + " (" + std::string(to_string(backend.kind)) + ")");
    } catch (const Error&) {
      continue;
    }
    const uint64_t seed = rng_.next();
    const ExecutionContext ctx{opts_.registry, opts_.remote_poll, opts_.remote_timeout};
    auto done = std::make_shared<std::promise<ExecutionOutcome>>();
    Execution exec{node.meta.name, clock_->now(), done->get_future().share(), {}};
    // The value is published before the wake-up so the loop never wakes to
    // an unready result.
    exec.worker = std::async(std::launch::async, [this, pod, backend, ctx, seed, done] {
      Xoshiro256 rng(seed);
      done->set_value(execute_pod(pod, backend, ctx, rng));
      nudge();
    });
    running_[name] = std::move(exec);
    ++launched;
  }
  return launched;
}

int ControlPlane::finish_due() {
  struct Done {
    Instant due;
    Instant started;
    std::string pod;
  };
  std::vector<Done> done;
  const Instant now = clock_->now();
  for (auto& [name, exec] : running_) {
    // Under a virtual clock completion must not depend on host speed.
    if (vclock_) exec.outcome.wait();
    if (exec.outcome.wait_for(std::chrono::seconds(0)) != std::future_status::ready) continue;
    const Instant due = exec.started + exec.outcome.get().duration_ms;
    if (now >= due) done.push_back({due, exec.started, name});
  }
  std::sort(done.begin(), done.end(), [](const Done& a, const Done& b) {
    return std::tie(a.due, a.started, a.pod) < std::tie(b.due, b.started, b.pod);
  });
  for (const auto& d : done) {
    Execution& exec = running_.at(d.pod);
    const ExecutionOutcome out = exec.outcome.get();
    exec.worker.wait();
    running_.erase(d.pod);
    try {
      for (const auto& line : out.logs) store_->append_log(d.pod, line);
      store_->transition_pod(d.pod, out.ok() ? PodPhase::Succeeded : PodPhase::Failed, out.exit_code);
    } catch (const Error&) {
      // Pod deleted while it ran.
    }
  }
  return static_cast<int>(done.size());
}

int ControlPlane::step() {
  std::lock_guard lock(step_mu_);
  int changes = 0;
  changes += reconcile_jobs(store_->snapshot());
  changes += static_cast<int>(scheduler_.run_cycle().size());
  changes += launch_bound(store_->snapshot());
  int finished = finish_due();
  changes += finished;
  if (finished > 0) changes += reconcile_jobs(store_->snapshot());
  return changes;
}

std::optional<Instant> ControlPlane::next_due() {
  std::lock_guard lock(step_mu_);
  std::optional<Instant> best;
  auto consider = [&](Instant t) { best = best ? std::min(*best, t) : t; };
  for (auto& [name, exec] : running_) {
    if (vclock_) exec.outcome.wait();
    if (exec.outcome.wait_for(std::chrono::seconds(0)) != std::future_status::ready) continue;
    consider(exec.started + exec.outcome.get().duration_ms);
  }
  const ClusterState state = store_->snapshot();
  for (const auto& [name, job] : state.jobs) {
    if (job.status->phase == JobPhase::Active && job.status->retry_at) consider(*job.status->retry_at);
  }
  return best;
}

bool ControlPlane::quiescent() {
  {
    std::lock_guard lock(step_mu_);
    if (!running_.empty()) return false;
    const ClusterState state = store_->snapshot();
    for (const auto& [name, job] : state.jobs) {
      if (job.status->phase != JobPhase::Active) continue;
      if (job.status->retry_at) return false;
      if (auto pod = state.pods.find(job.status->active_pod); pod != state.pods.end() && pod_terminal(pod->second)) {
        return false;
      }
    }
    for (const auto& [name, pod] : state.pods) {
      if (pod.status->phase == PodPhase::Pending && !pod.status->node_name.empty()) return false;
    }
    if (!schedule_cycle(state).empty()) return false;
  }
  return true;
}

bool ControlPlane::run_until_quiescent(Instant horizon_ms) {
  if (!vclock_) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(horizon_ms);
    while (std::chrono::steady_clock::now() < deadline) {
      if (!thread_.joinable()) step();
      if (quiescent()) return true;
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    return quiescent();
  }
  const Instant limit = clock_->now() + horizon_ms;
  for (;;) {
    while (step() > 0) {
    }
    auto due = next_due();
    if (!due) return true;
    if (*due > limit) {
      vclock_->advance_to(limit);
      return false;
    }
    vclock_->advance_to(std::max(*due, clock_->now() + (*due <= clock_->now() ? 1 : 0)));
  }
}

JobPhase ControlPlane::wait_for_job(const std::string& job, std::chrono::milliseconds timeout) {
  auto phase_of = [&] {
    const ClusterState state = store_->snapshot();
    auto it = state.jobs.find(job);
    if (it == state.jobs.end()) throw Error("UnknownJob", "job " + job + " not found");
    return it->second.status->phase;
  };
  if (vclock_) {
    const Instant limit = clock_->now() + timeout.count();
    for (;;) {
      while (step() > 0) {
      }
      if (JobPhase p = phase_of(); p != JobPhase::Active) return p;
      auto due = next_due();
      if (!due || *due > limit) {
        vclock_->advance_to(limit);
        return phase_of();
      }
      vclock_->advance_to(std::max(*due, clock_->now() + (*due <= clock_->now() ? 1 : 0)));
    }
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (!thread_.joinable()) step();
    if (JobPhase p = phase_of(); p != JobPhase::Active) return p;
    if (std::chrono::steady_clock::now() >= deadline) return JobPhase::Active;
    store_->wait_for_seq(store_->next_seq(), std::chrono::milliseconds(5));
  }
}

}  // namespace q8s
