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

// Event-sourced cluster store. Every mutation is validated, turned into an
// EventRecord and folded into ClusterState by the same apply() that replay
// uses, so a replayed log always reproduces the live state.

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "q8s/clock.hpp"
#include "q8s/types.hpp"

namespace q8s {

enum class EventKind {
  NodeRegistered,
  JobSubmitted,
  PodCreated,
  PodBound,
  PodPhaseChanged,
  JobStatusChanged,
  LogAppended,
  MetricSample,
  ObjectDeleted,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct EventRecord {
  int64_t seq = 0;
  Instant timestamp = 0;
  EventKind kind = EventKind::NodeRegistered;
  nlohmann::ordered_json payload;

  bool operator==(const EventRecord&) const = default;
};

/// One NDJSON line, no trailing newline.
std::string encode_event(const EventRecord& ev);
EventRecord decode_event(std::string_view line);

struct LogRecord {
  int64_t seq = 0;
  Instant timestamp = 0;
  std::string line;

  bool operator==(const LogRecord&) const = default;
};

struct Binding {
  std::string pod;
  std::string node;
  Instant bound_at = 0;

  bool operator==(const Binding&) const = default;
};

/// Backoff before the replacement pod after `attempts` failures.
Instant backoff_delay_ms(int attempts);

bool selector_matches(const LabelMap& selector, const LabelMap& labels);

/// The fold target. Plain value; not synchronized.
struct ClusterState {
  std::map<std::string, NodeSpec> nodes;
  std::map<std::string, JobSpec> jobs;
  std::map<std::string, PodSpec> pods;
  /// Seq of each live pod's PodCreated event.
  std::map<std::string, int64_t> pod_created_seq;
  std::map<std::string, std::vector<LogRecord>> logs;
  int64_t next_seq = 0;

  /// Folds one event. Throws CorruptHistory if it does not fit the state.
  void apply(const EventRecord& ev);

  /// Capacity minus requests of pods bound here and not yet terminal.
  ResourceMap allocatable(const std::string& node) const;

  /// Owned pods in creation order.
  std::vector<std::string> pods_of(const std::string& job) const;

  int priority_of(const PodSpec& pod) const;

  bool operator==(const ClusterState&) const = default;
};

/// Rebuilds state from a history whose seqs are dense from 0.
ClusterState replay(const std::vector<EventRecord>& events);

/// Reads an NDJSON event log. Missing file is an empty history.
std::vector<EventRecord> read_event_log(const std::filesystem::path& path);

class ClusterStore {
 public:
  using Listener = std::function<void(const EventRecord&)>;

  explicit ClusterStore(Clock& clock);
  /// Replays `<state_dir>/events.ndjson` and appends new events to it.
  ClusterStore(Clock& clock, const std::filesystem::path& state_dir);

  ClusterStore(const ClusterStore&) = delete;
  ClusterStore& operator=(const ClusterStore&) = delete;

  std::string register_node(NodeSpec spec);
  std::string submit_job(JobSpec spec);
  std::string create_pod(PodSpec spec);
  Binding bind_pod(const std::string& pod, const std::string& node);
  PodSpec transition_pod(const std::string& pod, PodPhase to, std::optional<int> exit_code = std::nullopt);
  JobStatus reconcile_job(const std::string& job);
  LogRecord append_log(const std::string& pod, const std::string& line);
  void record_sample(const std::string& name, const LabelMap& labels, double value);
  /// kind is Node, Job or Pod. Job deletion cascades to owned pods.
  void delete_object(std::string_view kind, const std::string& name);
  /// Marks Running pods Failed; their executors did not survive a restart.
  int fail_orphans();

  ClusterState snapshot() const;
  ResourceMap allocatable(const std::string& node) const;
  std::vector<LogRecord> logs(const std::string& pod, int64_t since_seq = -1) const;
  std::vector<EventRecord> events(int64_t since_seq = -1) const;
  int64_t next_seq() const;

  /// Listeners run under the store lock, in seq order, and must not call back in.
  /// The listener first sees every existing event.
  int subscribe(Listener fn);
  void unsubscribe(int id);

  /// Blocks until an event with seq >= `seq` exists or the timeout elapses.
  bool wait_for_seq(int64_t seq, std::chrono::milliseconds timeout) const;

  Clock& clock() const { return clock_; }

 private:
  const EventRecord& commit(EventKind kind, nlohmann::ordered_json payload);
  void create_pod_locked(PodSpec spec);
  const PodSpec& pod_locked(const std::string& name) const;

  Clock& clock_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  ClusterState state_;
  std::vector<EventRecord> events_;
  std::optional<std::ofstream> sink_;
  std::vector<std::pair<int, Listener>> listeners_;
  int next_listener_ = 0;
};

}  // namespace q8s
