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

// Metrics are a fold over the event log; nothing else updates them. Replaying
// a log therefore reproduces the exposition byte for byte.

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "q8s/store.hpp"

namespace q8s {

enum class MetricKind { Counter, Gauge, Histogram };

struct MetricSample {
  /// Full sample name, e.g. `q8s_pod_duration_seconds_bucket`.
  std::string name;
  std::vector<std::pair<std::string, std::string>> labels;
  double value = 0.0;
};

struct MetricFamily {
  std::string name;
  MetricKind kind = MetricKind::Gauge;
  std::string help;
  std::vector<MetricSample> samples;
};

/// Upper bounds of q8s_pod_duration_seconds, +Inf implied.
inline const std::vector<double> kDurationBounds = {0.1, 0.5, 1, 5, 30};

class MetricsRegistry {
 public:
  explicit MetricsRegistry(Instant utilization_window_ms = 60 * kTickMs);

  void record(const EventRecord& ev);
  std::vector<MetricFamily> families() const;

  int64_t pods_pending() const;
  int64_t pods_running() const;
  int64_t pods_terminal() const;
  int64_t pods_created() const;
  int64_t pods_deleted() const;

 private:
  struct PodInfo {
    std::string owner;
    std::string node;
    ResourceMap requests;
    PodPhase phase = PodPhase::Pending;
    std::optional<Instant> bound_at;
    std::optional<Instant> running_since;
  };
  struct QpuInterval {
    Instant start = 0;
    Instant end = 0;
  };

  void release(PodInfo& pod, Instant at);
  void forget_pod(const std::string& name, Instant at);
  double utilization(const std::string& node) const;

  mutable std::mutex mu_;
  Instant window_ms_;
  Instant last_ts_ = 0;
  int64_t jobs_submitted_ = 0, jobs_completed_ = 0, jobs_failed_ = 0;
  int64_t pending_ = 0, running_ = 0, terminal_ = 0, created_ = 0, deleted_ = 0;
  std::map<std::string, ResourceMap> capacity_;
  std::map<std::string, ResourceMap> used_;
  std::map<std::string, PodInfo> pods_;
  std::vector<int64_t> buckets_ = std::vector<int64_t>(kDurationBounds.size() + 1, 0);
  double duration_sum_ = 0.0;
  int64_t duration_count_ = 0;
  std::map<std::string, std::vector<QpuInterval>> qpu_busy_;
};

void record_event_metrics(const EventRecord& ev, MetricsRegistry& registry);

/// Text exposition format 0.0.4, families sorted by name.
std::string render_exposition(const MetricsRegistry& registry);
std::string render_exposition(std::vector<MetricFamily> families);

inline constexpr const char* kExpositionContentType = "text/plain; version=0.0.4";

/// Shortest decimal that round-trips; integers print without a fraction.
std::string format_metric_value(double v);

}  // namespace q8s
