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

#include <gtest/gtest.h>

#include "history_checks.hpp"
#include "q8s/error.hpp"
#include "test_util.hpp"

namespace q8s {
namespace {

using testkit::TempDir;

NodeSpec plain_node(const std::string& name, const std::string& accel, ResourceMap capacity = {}) {
  NodeSpec n;
  n.meta.name = name;
  n.meta.labels = {{"accelerator", accel}};
  n.capacity = std::move(capacity);
  return n;
}

JobSpec job_for(const std::string& name, const std::string& accel, const std::string& image,
                std::vector<std::string> args = {}) {
  JobSpec job = testkit::listing_job(name);
  job.pod_template.node_selector = {{"accelerator", accel}};
  job.pod_template.task.image = image;
  job.pod_template.task.args = std::move(args);
  if (accel != "qpu") job.pod_template.resources = {};
  return job;
}

ControlPlaneOptions virtual_opts(const std::filesystem::path& registry, RemoteQpuConfig remote = {}) {
  ControlPlaneOptions o;
  o.registry = registry;
  o.virtual_clock = true;
  remote.endpoint = "127.0.0.1:0";
  o.default_remote = remote;
  return o;
}

class ControlPlaneTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write_bundle(registry.path(), {"program", "v1.2.3"}, kBellQasm, 1024, 7);
    write_bundle(registry.path(), {"broken", "v1"}, "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n", 8, 1);
  }
  TempDir registry;
};

TEST_F(ControlPlaneTest, bell_job_completes_on_cpu) {
  ControlPlane cp(virtual_opts(registry.path()));
  cp.store().register_node(plain_node("cpu-0", "cpu"));
  cp.store().submit_job(job_for("bell", "cpu", "registry.example.com/program:v1.2.3"));
  EXPECT_EQ(cp.wait_for_job("bell", std::chrono::seconds(60)), JobPhase::Completed);

  const auto logs = collect_logs("bell-0", cp.store());
  ASSERT_GE(logs.size(), 2u);
  EXPECT_EQ(logs.front().line, "started on node cpu-0 (cpu-sim)");
  auto doc = nlohmann::json::parse(logs.back().line);
  int64_t total = 0;
  for (const auto& [k, v] : doc.at("counts").items()) {
    EXPECT_TRUE(k == "00" || k == "11");
    total += v.get<int64_t>();
  }
  EXPECT_EQ(total, 1024);
  const PodSpec pod = cp.store().snapshot().pods.at("bell-0");
  EXPECT_EQ(pod.status->exit_code, 0);
  // 2 gates plus 1024 * 0.01 ms, rounded up; measurements are free.
  EXPECT_EQ(*pod.status->finished_at - *pod.status->started_at, 13);
}

TEST_F(ControlPlaneTest, qpu_jobs_run_one_at_a_time_in_submission_order) {
  ControlPlane cp(virtual_opts(registry.path()));
  cp.store().register_node(testkit::listing_node("helmi-proxy"));
  std::vector<std::string> names;
  for (int i = 0; i < 10; ++i) {
    names.push_back("qjob-" + std::to_string(i));
    cp.store().submit_job(job_for(names.back(), "qpu", "registry.example.com/program:v1.2.3"));
  }
  ASSERT_TRUE(cp.run_until_quiescent());
  const auto state = cp.store().snapshot();
  for (const auto& n : names) EXPECT_EQ(state.jobs.at(n).status->phase, JobPhase::Completed) << n;

  const auto facts = testkit::check_history(cp.store().events());
  EXPECT_EQ(facts.violation, "");
  EXPECT_EQ(facts.qpu_intervals.size(), 10u);
  std::vector<std::string> expected;
  for (const auto& n : names) expected.push_back(n + "-0");
  EXPECT_EQ(facts.bind_order, expected);
  EXPECT_EQ(cp.store().allocatable("helmi-proxy").at("vendor.example.com/qpu"), 1);
}

TEST_F(ControlPlaneTest, virtual_runs_are_deterministic) {
  auto run = [&] {
    ControlPlane cp(virtual_opts(registry.path()));
    cp.store().register_node(testkit::listing_node("helmi-proxy"));
    cp.store().register_node(plain_node("cpu-0", "cpu"));
    for (int i = 0; i < 5; ++i) {
      cp.store().submit_job(job_for("q" + std::to_string(i), "qpu", "registry.example.com/program:v1.2.3"));
      cp.store().submit_job(job_for("c" + std::to_string(i), "cpu", "noseed:v1"));
    }
    EXPECT_TRUE(cp.run_until_quiescent());
    std::string log;
    for (const auto& ev : cp.store().events()) log += encode_event(ev) + "\n";
    return log;
  };
  write_bundle(registry.path(), {"noseed", "v1"}, kBellQasm, 64, std::nullopt);
  const std::string first = run();
  EXPECT_EQ(run(), first);
}

TEST_F(ControlPlaneTest, failing_remote_exhausts_backoff_limit) {
  RemoteQpuConfig remote;
  remote.failure_prob = 1.0;
  ControlPlane cp(virtual_opts(registry.path(), remote));
  cp.store().register_node(testkit::listing_node("helmi-proxy"));
  JobSpec job = job_for("doomed", "qpu", "registry.example.com/program:v1.2.3");
  job.backoff_limit = 2;
  cp.store().submit_job(job);
  ASSERT_TRUE(cp.run_until_quiescent());

  const auto state = cp.store().snapshot();
  EXPECT_EQ(state.jobs.at("doomed").status->phase, JobPhase::Failed);
  const auto pods = state.pods_of("doomed");
  ASSERT_EQ(pods.size(), 3u);
  for (const auto& p : pods) {
    EXPECT_EQ(state.pods.at(p).status->phase, PodPhase::Failed);
    EXPECT_EQ(state.pods.at(p).status->exit_code, exit_code::kRemoteUnavailable);
  }
  // Replacement pods wait out the backoff after each failure.
  const Instant f0 = *state.pods.at(pods[0]).status->finished_at;
  const Instant f1 = *state.pods.at(pods[1]).status->finished_at;
  EXPECT_GE(*state.pods.at(pods[1]).meta.creation_timestamp - f0, backoff_delay_ms(1));
  EXPECT_GE(*state.pods.at(pods[2]).meta.creation_timestamp - f1, backoff_delay_ms(2));
}

TEST_F(ControlPlaneTest, scripted_first_failure_then_success) {
  RemoteQpuConfig remote;
  remote.fail_first = 1;
  ControlPlane cp(virtual_opts(registry.path(), remote));
  cp.store().register_node(testkit::listing_node("helmi-proxy"));
  cp.store().submit_job(job_for("flaky", "qpu", "registry.example.com/program:v1.2.3"));
  EXPECT_EQ(cp.wait_for_job("flaky", std::chrono::seconds(600)), JobPhase::Completed);
  const auto state = cp.store().snapshot();
  EXPECT_EQ(state.jobs.at("flaky").status->attempts, 1);
  EXPECT_EQ(state.pods_of("flaky").size(), 2u);
}

TEST_F(ControlPlaneTest, unschedulable_job_times_out_active) {
  ControlPlane cp(virtual_opts(registry.path()));
  cp.store().register_node(plain_node("cpu-0", "cpu"));
  JobSpec job = job_for("gpu-job", "gpu", "registry.example.com/program:v1.2.3");
  job.pod_template.resources.requests = {{"nvidia.com/gpu", 1}};
  job.pod_template.resources.limits = {{"nvidia.com/gpu", 1}};
  cp.store().submit_job(job);
  EXPECT_EQ(cp.wait_for_job("gpu-job", std::chrono::seconds(60)), JobPhase::Active);
  EXPECT_TRUE(cp.run_until_quiescent());
  EXPECT_EQ(cp.store().snapshot().pods.at("gpu-job-0").status->phase, PodPhase::Pending);
}

TEST_F(ControlPlaneTest, restart_reproduces_state_and_metrics) {
  TempDir state_dir;
  ClusterState before;
  std::string metrics_before;
  {
    auto o = virtual_opts(registry.path());
    o.state_dir = state_dir.path();
    ControlPlane cp(o);
    cp.store().register_node(testkit::listing_node("helmi-proxy"));
    for (int i = 0; i < 3; ++i) {
      cp.store().submit_job(job_for("r" + std::to_string(i), "qpu", "registry.example.com/program:v1.2.3"));
    }
    ASSERT_TRUE(cp.run_until_quiescent());
    before = cp.store().snapshot();
    metrics_before = render_exposition(cp.metrics());
  }
  auto o = virtual_opts(registry.path());
  o.state_dir = state_dir.path();
  ControlPlane cp(o);
  EXPECT_EQ(cp.store().snapshot(), before);
  EXPECT_EQ(render_exposition(cp.metrics()), metrics_before);
  EXPECT_TRUE(cp.run_until_quiescent());
  EXPECT_EQ(cp.store().snapshot(), before);
}

TEST_F(ControlPlaneTest, running_pods_fail_on_restart_and_job_retries) {
  TempDir state_dir;
  {
    VirtualClock clock;
    ClusterStore store(clock, state_dir.path());
    store.register_node(plain_node("cpu-0", "cpu"));
    store.submit_job(job_for("orphan", "cpu", "registry.example.com/program:v1.2.3"));
    store.bind_pod("orphan-0", "cpu-0");
    store.transition_pod("orphan-0", PodPhase::Running);
  }
  auto o = virtual_opts(registry.path());
  o.state_dir = state_dir.path();
  ControlPlane cp(o);
  const auto state = cp.store().snapshot();
  EXPECT_EQ(state.pods.at("orphan-0").status->phase, PodPhase::Failed);
  EXPECT_EQ(state.pods.at("orphan-0").status->exit_code, 1);
  EXPECT_EQ(cp.wait_for_job("orphan", std::chrono::seconds(60)), JobPhase::Completed);
  EXPECT_EQ(cp.store().snapshot().jobs.at("orphan").status->attempts, 1);
}

TEST_F(ControlPlaneTest, bound_pending_pods_start_after_restart) {
  TempDir state_dir;
  {
    VirtualClock clock;
    ClusterStore store(clock, state_dir.path());
    store.register_node(plain_node("cpu-0", "cpu"));
    store.submit_job(job_for("bound", "cpu", "registry.example.com/program:v1.2.3"));
    store.bind_pod("bound-0", "cpu-0");
  }
  auto o = virtual_opts(registry.path());
  o.state_dir = state_dir.path();
  ControlPlane cp(o);
  EXPECT_EQ(cp.wait_for_job("bound", std::chrono::seconds(60)), JobPhase::Completed);
  EXPECT_EQ(cp.store().snapshot().jobs.at("bound").status->attempts, 0);
}

TEST_F(ControlPlaneTest, wall_clock_loop_runs_jobs) {
  ControlPlaneOptions o;
  o.registry = registry.path();
  o.tick = std::chrono::milliseconds(50);
  ControlPlane cp(o);
  cp.start();
  cp.store().register_node(plain_node("cpu-0", "cpu"));
  cp.store().register_node(testkit::listing_node("helmi-proxy"));
  cp.store().submit_job(job_for("wall-cpu", "cpu", "registry.example.com/program:v1.2.3"));
  cp.store().submit_job(job_for("wall-qpu", "qpu", "registry.example.com/program:v1.2.3"));
  EXPECT_EQ(cp.wait_for_job("wall-cpu", std::chrono::seconds(5)), JobPhase::Completed);
  EXPECT_EQ(cp.wait_for_job("wall-qpu", std::chrono::seconds(5)), JobPhase::Completed);
  EXPECT_TRUE(cp.run_until_quiescent(5000));
  cp.stop();
}

// Random mixes of healthy, broken and flaky work: whatever happens, a pod's
// exit code is 0 exactly when it Succeeded, and every job ends terminal.
TEST_F(ControlPlaneTest, exit_code_matches_phase_under_fault_injection) {
  for (uint64_t round = 0; round < 6; ++round) {
    Xoshiro256 rng(round + 100);
    RemoteQpuConfig remote;
    remote.failure_prob = 0.4;
    remote.seed = round;
    auto o = virtual_opts(registry.path(), remote);
    o.seed = round;
    ControlPlane cp(o);
    cp.store().register_node(plain_node("cpu-0", "cpu"));
    cp.store().register_node(plain_node("gpu-0", "gpu", {{"nvidia.com/gpu", 2}}));
    cp.store().register_node(testkit::listing_node("helmi-proxy"));
    const char* accels[] = {"cpu", "gpu", "qpu"};
    const char* images[] = {"registry.example.com/program:v1.2.3", "broken:v1", "missing:v9",
                            "registry.example.com/program:v1.2.3"};
    for (int j = 0; j < 12; ++j) {
      const std::string accel = accels[rng.next() % 3];
      JobSpec job = job_for("f" + std::to_string(j), accel, images[rng.next() % 4]);
      job.backoff_limit = static_cast<int>(rng.next() % 3);
      if (accel == "gpu") {
        job.pod_template.resources.requests = {{"nvidia.com/gpu", 1}};
        job.pod_template.resources.limits = {{"nvidia.com/gpu", 1}};
      }
      if (rng.next() % 4 == 0) job.pod_template.task.args = {"--shots", "0"};
      cp.store().submit_job(job);
    }
    ASSERT_TRUE(cp.run_until_quiescent());
    const auto state = cp.store().snapshot();
    for (const auto& [name, job] : state.jobs) EXPECT_NE(job.status->phase, JobPhase::Active) << name;
    int failures = 0;
    for (const auto& [name, pod] : state.pods) {
      ASSERT_TRUE(is_terminal(pod.status->phase)) << name;
      ASSERT_TRUE(pod.status->exit_code.has_value()) << name;
      EXPECT_EQ(*pod.status->exit_code == 0, pod.status->phase == PodPhase::Succeeded) << name;
      if (pod.status->phase == PodPhase::Failed) ++failures;
    }
    EXPECT_GT(failures, 0);
    EXPECT_EQ(testkit::check_history(cp.store().events()).violation, "");
  }
}

}  // namespace
}  // namespace q8s
