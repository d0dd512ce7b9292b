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

// Cluster object model shared by the manifest codec, the store, the
// scheduler and the runtime.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace q8s {

/// Milliseconds on the cluster clock (wall: since the Unix epoch; virtual:
/// since the virtual clock's origin).
using Instant = int64_t;

/// Named integer quantities: capacity, requests, limits.
using ResourceMap = std::map<std::string, int64_t>;
using LabelMap = std::map<std::string, std::string>;

constexpr int kDefaultBackoffLimit = 6;
constexpr int kMaxBackoffLimit = 16;
/// Job names leave room for the `-<attempt>` suffix of their pods.
constexpr size_t kMaxJobNameLength = 60;

/// True for resource keys naming quantum hardware, e.g. `vendor.example.com/qpu`.
bool is_qpu_resource(std::string_view key);

/// DNS-label check used for every object name.
bool is_valid_name(std::string_view name);

struct ObjectMeta {
  std::string name;
  LabelMap labels;
  std::optional<Instant> creation_timestamp;
  /// Set by the parser when a Node omitted `metadata.name`.
  bool needs_name = false;

  bool operator==(const ObjectMeta&) const = default;
};

struct NoiseModel {
  /// Independent per-clbit flip probability applied after sampling.
  double readout_flip_prob = 0.0;

  bool operator==(const NoiseModel&) const = default;
};

struct RemoteQpuConfig {
  std::string endpoint;  // host:port
  int64_t submit_latency_ms = 0;
  double failure_prob = 0.0;
  int queue_depth_cap = 1;
  /// The first `fail_first` submissions fail regardless of `failure_prob`.
  int fail_first = 0;
  /// Seeds the stub's fault-injection generator.
  uint64_t seed = 0;

  bool operator==(const RemoteQpuConfig&) const = default;
};

enum class BackendKind { CpuSim, GpuSim, RemoteQpu };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> parse_backend_kind(std::string_view text);

struct BackendBinding {
  BackendKind kind = BackendKind::CpuSim;
  std::string resource_key;
  NoiseModel noise;
  double speed_factor = 1.0;
  std::optional<RemoteQpuConfig> remote;

  bool operator==(const BackendBinding&) const = default;
};

struct NodeSpec {
  ObjectMeta meta;
  ResourceMap capacity;
  std::optional<BackendBinding> backend;

  bool operator==(const NodeSpec&) const = default;
};

struct ResourceRequirements {
  ResourceMap requests;
  ResourceMap limits;

  bool operator==(const ResourceRequirements&) const = default;
};

struct TaskRef {
  std::string name;
  std::string image;
  std::vector<std::string> command;
  /// `--shots N` / `--seed N` overrides for the bundle's defaults.
  std::vector<std::string> args;

  bool operator==(const TaskRef&) const = default;
};

struct PodTemplate {
  LabelMap node_selector;
  TaskRef task;
  ResourceRequirements resources;

  bool operator==(const PodTemplate&) const = default;
};

enum class PodPhase { Pending, Running, Succeeded, Failed };
enum class JobPhase { Active, Completed, Failed };

std::string_view to_string(PodPhase phase);
std::string_view to_string(JobPhase phase);
std::optional<PodPhase> parse_pod_phase(std::string_view text);
std::optional<JobPhase> parse_job_phase(std::string_view text);

inline bool is_terminal(PodPhase p) { return p == PodPhase::Succeeded || p == PodPhase::Failed; }

struct JobStatus {
  JobPhase phase = JobPhase::Active;
  /// Number of failed pods so far.
  int attempts = 0;
  std::string active_pod;
  /// When a replacement pod is due after a failure.
  std::optional<Instant> retry_at;

  bool operator==(const JobStatus&) const = default;
};

struct PodStatus {
  PodPhase phase = PodPhase::Pending;
  std::string node_name;
  std::optional<int> exit_code;
  std::optional<Instant> bound_at;
  std::optional<Instant> started_at;
  std::optional<Instant> finished_at;

  bool operator==(const PodStatus&) const = default;
};

struct JobSpec {
  ObjectMeta meta;
  PodTemplate pod_template;
  int backoff_limit = kDefaultBackoffLimit;
  int priority = 0;
  std::optional<JobStatus> status;

  bool operator==(const JobSpec&) const = default;
};

struct PodSpec {
  ObjectMeta meta;
  std::string owner_job;
  LabelMap node_selector;
  TaskRef task;
  ResourceRequirements resources;
  std::optional<PodStatus> status;

  bool operator==(const PodSpec&) const = default;
};

using ClusterObject = std::variant<NodeSpec, JobSpec, PodSpec>;

/// "Node", "Job" or "Pod".
std::string_view kind_of(const ClusterObject& obj);
const ObjectMeta& meta_of(const ClusterObject& obj);

}  // namespace q8s
