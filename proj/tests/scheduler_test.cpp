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

#include "q8s/scheduler.hpp"

#include <random>

#include "gtest/gtest.h"
#include "history_checks.hpp"
#include "q8s/manifest.hpp"
#include "test_util.hpp"

using namespace q8s;
using q8s::testkit::listing_job;
using q8s::testkit::listing_node;
using q8s::testkit::read_data;

namespace {

NodeSpec node_with(const std::string& name, ResourceMap cap, LabelMap labels = {}) {
  NodeSpec n;
  n.meta.name = name;
  n.meta.labels = std::move(labels);
  n.capacity = std::move(cap);
  return n;
}

PodSpec listing_pod() { return std::get<PodSpec>(parse_manifest(read_data("pod.yaml")).at(0)); }

}  // namespace

TEST(FilterNodes, listing_pod_against_listing_node) {
  NodeSpec node = listing_node("helmi-proxy");
  PodSpec pod = listing_pod();
  EXPECT_EQ(filter_nodes(pod, {{&node, {{"vendor.example.com/qpu", 1}}}}), std::vector<std::string>{"helmi-proxy"});
  EXPECT_TRUE(filter_nodes(pod, {{&node, {{"vendor.example.com/qpu", 0}}}}).empty());
}

TEST(FilterNodes, vacuous_constraints_and_order) {
  NodeSpec b = node_with("b", {});
  NodeSpec a = node_with("a", {{"x", 1}}, {{"k", "v"}});
  PodSpec free;
  EXPECT_EQ(filter_nodes(free, {{&b, {}}, {&a, a.capacity}}), (std::vector<std::string>{"b", "a"}));
  PodSpec picky;
  picky.node_selector = {{"k", "v"}};
  EXPECT_EQ(filter_nodes(picky, {{&b, {}}, {&a, a.capacity}}), std::vector<std::string>{"a"});
  picky.node_selector = {{"k", "w"}};
  EXPECT_TRUE(filter_nodes(picky, {{&b, {}}, {&a, a.capacity}}).empty());
}

TEST(PickNode, score_and_tie_break) {
  NodeSpec a = node_with("a", {}), b = node_with("b", {});
  EXPECT_EQ(pick_node({{&b, {{"g", 1}}}, {&a, {{"g", 1}}}}), "a");
  EXPECT_EQ(pick_node({{&a, {{"g", 0}}}, {&b, {{"g", 2}}}}), "b");
  EXPECT_EQ(pick_node({{&b, {}}}), "b");
}

TEST(ScheduleCycle, two_qpu_pods_one_node) {
  VirtualClock clock;
  ClusterStore s(clock);
  Scheduler sched(s);
  s.register_node(listing_node("helmi-proxy"));
  s.submit_job(listing_job("first"));
  s.submit_job(listing_job("second"));
  auto decisions = schedule_cycle(s.snapshot());
  ASSERT_EQ(decisions.size(), 1u);
  EXPECT_EQ(decisions[0].pod, "first-0");
  EXPECT_EQ(sched.run_cycle().size(), 1u);
  EXPECT_EQ(s.snapshot().pods.at("second-0").status->phase, PodPhase::Pending);
  EXPECT_TRUE(sched.run_cycle().empty());

  s.transition_pod("first-0", PodPhase::Running);
  s.transition_pod("first-0", PodPhase::Succeeded, 0);
  auto next = sched.run_cycle();
  ASSERT_EQ(next.size(), 1u);
  EXPECT_EQ(next[0].pod, "second-0");
  EXPECT_EQ(next[0].node, "helmi-proxy");
}

TEST(ScheduleCycle, empty_queue) {
  VirtualClock clock;
  ClusterStore s(clock);
  s.register_node(listing_node("helmi-proxy"));
  EXPECT_TRUE(schedule_cycle(s.snapshot()).empty());
}

TEST(ScheduleCycle, within_cycle_accounting) {
  VirtualClock clock;
  ClusterStore s(clock);
  s.register_node(node_with("gpu", {{"nvidia.com/gpu", 2}}, {{"accelerator", "gpu"}}));
  for (const char* name : {"a", "b", "c"}) {
    JobSpec j = listing_job(name);
    j.pod_template.node_selector = {{"accelerator", "gpu"}};
    j.pod_template.resources.requests = j.pod_template.resources.limits = {{"nvidia.com/gpu", 1}};
    s.submit_job(j);
  }
  auto decisions = schedule_cycle(s.snapshot());
  ASSERT_EQ(decisions.size(), 2u);
  EXPECT_EQ(decisions[0].pod, "a-0");
  EXPECT_EQ(decisions[1].pod, "b-0");
}

TEST(ScheduleCycle, priority_then_fifo) {
  VirtualClock clock;
  ClusterStore s(clock);
  s.register_node(listing_node("helmi-proxy"));
  s.submit_job(listing_job("low"));
  JobSpec urgent = listing_job("urgent");
  urgent.priority = 5;
  s.submit_job(urgent);
  s.submit_job(listing_job("later"));
  auto queue = build_queue(s.snapshot());
  ASSERT_EQ(queue.size(), 3u);
  EXPECT_EQ(queue[0].pod, "urgent-0");
  EXPECT_EQ(queue[1].pod, "low-0");
  EXPECT_EQ(queue[2].pod, "later-0");
  EXPECT_EQ(schedule_cycle(s.snapshot()).at(0).pod, "urgent-0");
}

TEST(ScheduleCycle, gpu_variant_lands_on_gpu_node_only) {
  VirtualClock clock;
  ClusterStore s(clock);
  s.register_node(node_with("cpu", {}, {{"accelerator", "cpu"}}));
  s.register_node(node_with("gpu", {{"nvidia.com/gpu", 1}}, {{"accelerator", "gpu"}}));
  s.register_node(listing_node("helmi-proxy"));
  JobSpec j = listing_job("quantum-job");
  j.pod_template.node_selector = {{"accelerator", "gpu"}};
  j.pod_template.resources.requests = j.pod_template.resources.limits = {{"nvidia.com/gpu", 1}};
  s.submit_job(j);
  auto d = schedule_cycle(s.snapshot());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].node, "gpu");
}

TEST(Scheduler, custom_policy_reorders) {
  struct Reverse : SchedulingPolicy {
    void order(std::vector<QueueEntry>& q, const ClusterState&) const override { std::reverse(q.begin(), q.end()); }
  } reverse;
  VirtualClock clock;
  ClusterStore s(clock);
  s.register_node(listing_node("helmi-proxy"));
  s.submit_job(listing_job("a"));
  s.submit_job(listing_job("b"));
  Scheduler sched(s, &reverse);
  EXPECT_EQ(sched.run_cycle().at(0).pod, "b-0");
}

// Random clusters and queues: every decision is feasible at decision time,
// no node is overcommitted by one cycle, and the output is deterministic.
TEST(SchedulerProperty, sound_deterministic_and_bounded) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    VirtualClock clock;
    ClusterStore s(clock);
    int nodes = 1 + static_cast<int>(rng() % 4);
    for (int n = 0; n < nodes; ++n) {
      ResourceMap cap = {{"nvidia.com/gpu", static_cast<int64_t>(rng() % 3)},
                         {"vendor.example.com/qpu", static_cast<int64_t>(rng() % 2)}};
      s.register_node(node_with("n" + std::to_string(n), cap, {{"zone", std::to_string(rng() % 2)}}));
    }
    int jobs = static_cast<int>(rng() % 8);
    for (int j = 0; j < jobs; ++j) {
      JobSpec spec = listing_job("j" + std::to_string(j));
      spec.priority = static_cast<int>(rng() % 3);
      spec.pod_template.node_selector.clear();
      if (rng() % 2) spec.pod_template.node_selector = {{"zone", std::to_string(rng() % 2)}};
      ResourceMap req;
      if (rng() % 2) req["nvidia.com/gpu"] = static_cast<int64_t>(1 + rng() % 2);
      if (rng() % 2) req["vendor.example.com/qpu"] = 1;
      spec.pod_template.resources.requests = spec.pod_template.resources.limits = req;
      s.submit_job(spec);
    }
    ClusterState snap = s.snapshot();
    auto decisions = schedule_cycle(snap);
    EXPECT_EQ(decisions, schedule_cycle(snap));

    std::map<std::string, ResourceMap> used;
    for (const auto& d : decisions) {
      const PodSpec& pod = snap.pods.at(d.pod);
      EXPECT_TRUE(selector_matches(pod.node_selector, snap.nodes.at(d.node).meta.labels));
      for (const auto& [k, q] : pod.resources.requests) used[d.node][k] += q;
    }
    for (const auto& [node, res] : used) {
      for (const auto& [k, q] : res) {
        auto cap = snap.nodes.at(node).capacity;
        EXPECT_LE(q, cap.count(k) ? cap.at(k) : 0) << node << " " << k;
      }
    }
    // Every decision binds, and the log agrees.
    Scheduler sched(s);
    EXPECT_EQ(sched.run_cycle().size(), decisions.size());
    EXPECT_EQ(testkit::check_history(s.events()).violation, "");
    // An unbound pod that fits somewhere after the cycle would be a missed bind.
    ClusterState after = s.snapshot();
    for (const auto& entry : build_queue(after)) {
      EXPECT_TRUE(filter_nodes(after.pods.at(entry.pod), node_views(after)).empty()) << entry.pod;
    }
  }
}

TEST(SchedulerProperty, feasible_pod_bound_within_one_cycle_of_freeing) {
  VirtualClock clock;
  ClusterStore s(clock);
  Scheduler sched(s);
  s.register_node(listing_node("helmi-proxy"));
  for (int j = 0; j < 6; ++j) s.submit_job(listing_job("j" + std::to_string(j)));
  std::vector<std::string> order;
  for (int round = 0; round < 6; ++round) {
    auto bound = sched.run_cycle();
    ASSERT_EQ(bound.size(), 1u) << round;
    order.push_back(bound[0].pod);
    s.transition_pod(bound[0].pod, PodPhase::Running);
    s.transition_pod(bound[0].pod, PodPhase::Succeeded, 0);
  }
  EXPECT_EQ(order, (std::vector<std::string>{"j0-0", "j1-0", "j2-0", "j3-0", "j4-0", "j5-0"}));
}
