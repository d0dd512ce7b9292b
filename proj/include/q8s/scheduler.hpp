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

#include <string>
#include <vector>

#include "q8s/store.hpp"

namespace q8s {

struct QueueEntry {
  std::string pod;
  int priority = 0;
  /// Seq of the pod's PodCreated event.
  int64_t submission_seq = 0;

  bool operator==(const QueueEntry&) const = default;
};

/// Pending unbound pods, higher priority first, then oldest first.
std::vector<QueueEntry> build_queue(const ClusterState& state);

struct NodeView {
  const NodeSpec* node = nullptr;
  ResourceMap allocatable;
};

std::vector<NodeView> node_views(const ClusterState& state);

bool fits(const PodSpec& pod, const NodeView& view);

/// Names of feasible nodes, in input order.
std::vector<std::string> filter_nodes(const PodSpec& pod, const std::vector<NodeView>& nodes);

/// Most total free units wins; ties go to the smallest name. `feasible` is nonempty.
std::string pick_node(const std::vector<NodeView>& feasible);

/// Decisions for one cycle. Earlier decisions in the cycle reduce the
/// allocatable seen by later ones. Pure: same state, same output.
std::vector<Binding> schedule_cycle(const ClusterState& state);

/// Extension point for ordering policies beyond priority and FIFO.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual void order(std::vector<QueueEntry>& queue, const ClusterState& state) const = 0;
};

class Scheduler {
 public:
  explicit Scheduler(ClusterStore& store, const SchedulingPolicy* policy = nullptr)
      : store_(store), policy_(policy) {}

  /// Computes decisions on a snapshot and binds them. A decision that lost a
  /// race is dropped; the pod stays queued.
  std::vector<Binding> run_cycle();

 private:
  ClusterStore& store_;
  const SchedulingPolicy* policy_;
};

}  // namespace q8s
