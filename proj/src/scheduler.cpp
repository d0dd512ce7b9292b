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

#include <algorithm>

#include "q8s/error.hpp"

namespace q8s {

namespace {

int64_t free_units(const NodeView& v) {
  int64_t total = 0;
  for (const auto& [key, qty] : v.allocatable) total += qty;
  return total;
}

std::vector<Binding> decide(const ClusterState& state, const std::vector<QueueEntry>& queue) {
  std::vector<NodeView> views = node_views(state);
  std::vector<Binding> decisions;
  for (const auto& entry : queue) {
    const PodSpec& pod = state.pods.at(entry.pod);
    std::vector<NodeView> feasible;
    for (const auto& v : views) {
      if (fits(pod, v)) feasible.push_back(v);
    }
    if (feasible.empty()) continue;
    std::string chosen = pick_node(feasible);
    for (auto& v : views) {
      if (v.node->meta.name != chosen) continue;
      for (const auto& [key, qty] : pod.resources.requests) v.allocatable[key] -= qty;
    }
    decisions.push_back(Binding{entry.pod, chosen, 0});
  }
  return decisions;
}

}  // namespace

std::vector<QueueEntry> build_queue(const ClusterState& state) {
  std::vector<QueueEntry> queue;
  for (const auto& [name, pod] : state.pods) {
    if (pod.status->phase != PodPhase::Pending || !pod.status->node_name.empty()) continue;
    queue.push_back(QueueEntry{name, state.priority_of(pod), state.pod_created_seq.at(name)});
  }
  std::sort(queue.begin(), queue.end(), [](const QueueEntry& a, const QueueEntry& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.submission_seq < b.submission_seq;
  });
  return queue;
}

std::vector<NodeView> node_views(const ClusterState& state) {
  std::vector<NodeView> views;
  for (const auto& [name, node] : state.nodes) views.push_back(NodeView{&node, state.allocatable(name)});
  return views;
}

bool fits(const PodSpec& pod, const NodeView& view) {
  if (!selector_matches(pod.node_selector, view.node->meta.labels)) return false;
  for (const auto& [key, qty] : pod.resources.requests) {
    auto it = view.allocatable.find(key);
    if (qty > (it == view.allocatable.end() ? 0 : it->second)) return false;
  }
  return true;
}

std::vector<std::string> filter_nodes(const PodSpec& pod, const std::vector<NodeView>& nodes) {
  std::vector<std::string> out;
  for (const auto& v : nodes) {
    if (fits(pod, v)) out.push_back(v.node->meta.name);
  }
  return out;
}

std::string pick_node(const std::vector<NodeView>& feasible) {
  const NodeView* best = &feasible.front();
  for (const auto& v : feasible) {
    int64_t a = free_units(v), b = free_units(*best);
    if (a > b || (a == b && v.node->meta.name < best->node->meta.name)) best = &v;
  }
  return best->node->meta.name;
}

std::vector<Binding> schedule_cycle(const ClusterState& state) { return decide(state, build_queue(state)); }

std::vector<Binding> Scheduler::run_cycle() {
  ClusterState snap = store_.snapshot();
  std::vector<QueueEntry> queue = build_queue(snap);
  if (policy_) policy_->order(queue, snap);
  std::vector<Binding> bound;
  for (const auto& d : decide(snap, queue)) {
    try {
      bound.push_back(store_.bind_pod(d.pod, d.node));
    } catch (const Error&) {
      // Lost a race with another mutation; retried next cycle.
    }
  }
  return bound;
}

}  // namespace q8s
