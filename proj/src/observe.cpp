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

#include "q8s/observe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "q8s/manifest.hpp"

namespace q8s {

namespace {

bool qpu_node(const ResourceMap& capacity) {
  return std::any_of(capacity.begin(), capacity.end(), [](const auto& kv) { return is_qpu_resource(kv.first); });
}

bool requests_qpu(const ResourceMap& requests) {
  return std::any_of(requests.begin(), requests.end(),
                     [](const auto& kv) { return is_qpu_resource(kv.first) && kv.second > 0; });
}

std::string escape_label(const std::string& v) {
  std::string out;
  for (char c : v) {
    if (c == '\\') out += "\\\\";
    else if (c == '"') out += "\\\"";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

std::string escape_help(const std::string& v) {
  std::string out;
  for (char c : v) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

std::string_view kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::Counter: return "counter";
    case MetricKind::Gauge: return "gauge";
    case MetricKind::Histogram: return "histogram";
  }
  return "untyped";
}

}  // namespace

std::string format_metric_value(double v) {
  if (std::isinf(v)) return v > 0 ? "+Inf" : "-Inf";
  if (std::isnan(v)) return "NaN";
  if (v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<int64_t>(v));
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MetricsRegistry::MetricsRegistry(Instant utilization_window_ms) : window_ms_(utilization_window_ms) {}

void MetricsRegistry::release(PodInfo& pod, Instant at) {
  if (!pod.node.empty() && pod.phase != PodPhase::Succeeded && pod.phase != PodPhase::Failed) {
    for (const auto& [k, q] : pod.requests) used_[pod.node][k] -= q;
  }
  if (pod.running_since && requests_qpu(pod.requests) && capacity_.count(pod.node) &&
      qpu_node(capacity_.at(pod.node))) {
    qpu_busy_[pod.node].push_back({*pod.running_since, at});
  }
  pod.running_since.reset();
}

void MetricsRegistry::forget_pod(const std::string& name, Instant at) {
  auto it = pods_.find(name);
  if (it == pods_.end()) return;
  PodInfo& pod = it->second;
  switch (pod.phase) {
    case PodPhase::Pending: --pending_; break;
    case PodPhase::Running: --running_; break;
    default: --terminal_; break;
  }
  release(pod, at);
  ++deleted_;
  pods_.erase(it);
}

void MetricsRegistry::record(const EventRecord& ev) {
  std::lock_guard lock(mu_);
  last_ts_ = std::max(last_ts_, ev.timestamp);
  const auto& p = ev.payload;
  switch (ev.kind) {
    case EventKind::NodeRegistered: {
      const auto node = std::get<NodeSpec>(decode_object(p.at("object")));
      capacity_[node.meta.name] = node.capacity;
      used_[node.meta.name] = {};
      break;
    }
    case EventKind::JobSubmitted:
      ++jobs_submitted_;
      break;
    case EventKind::PodCreated: {
      const auto pod = std::get<PodSpec>(decode_object(p.at("object")));
      pods_[pod.meta.name] = PodInfo{pod.owner_job, "", pod.resources.requests, PodPhase::Pending, {}, {}};
      ++pending_;
      ++created_;
      break;
    }
    case EventKind::PodBound: {
      PodInfo& pod = pods_.at(p.at("pod").get<std::string>());
      pod.node = p.at("node").get<std::string>();
      pod.bound_at = ev.timestamp;
      for (const auto& [k, q] : pod.requests) used_[pod.node][k] += q;
      break;
    }
    case EventKind::PodPhaseChanged: {
      PodInfo& pod = pods_.at(p.at("pod").get<std::string>());
      auto to = parse_pod_phase(p.at("phase").get<std::string>()).value_or(PodPhase::Pending);
      if (to == PodPhase::Running) {
        --pending_;
        ++running_;
        pod.running_since = ev.timestamp;
        pod.phase = to;
      } else if (is_terminal(to)) {
        --running_;
        ++terminal_;
        release(pod, ev.timestamp);
        pod.phase = to;
        double secs = static_cast<double>(ev.timestamp - pod.bound_at.value_or(ev.timestamp)) / 1000.0;
        size_t b = 0;
        while (b < kDurationBounds.size() && secs > kDurationBounds[b]) ++b;
        ++buckets_[b];
        duration_sum_ += secs;
        ++duration_count_;
      }
      break;
    }
    case EventKind::JobStatusChanged: {
      const std::string phase = p.at("phase").get<std::string>();
      if (phase == "Completed") ++jobs_completed_;
      if (phase == "Failed") ++jobs_failed_;
      break;
    }
    case EventKind::ObjectDeleted: {
      const std::string kind = p.at("kind").get<std::string>();
      const std::string name = p.at("name").get<std::string>();
      if (kind == "Pod") {
        forget_pod(name, ev.timestamp);
      } else if (kind == "Job") {
        std::vector<std::string> owned;
        for (const auto& [pod, info] : pods_) {
          if (info.owner == name) owned.push_back(pod);
        }
        for (const auto& pod : owned) forget_pod(pod, ev.timestamp);
      } else if (kind == "Node") {
        capacity_.erase(name);
        used_.erase(name);
        qpu_busy_.erase(name);
      }
      break;
    }
    case EventKind::LogAppended:
    case EventKind::MetricSample:
      break;
  }
}

double MetricsRegistry::utilization(const std::string& node) const {
  const Instant hi = last_ts_, lo = last_ts_ - window_ms_;
  Instant busy = 0;
  auto overlap = [&](Instant a, Instant b) { return std::max<Instant>(0, std::min(b, hi) - std::max(a, lo)); };
  if (auto it = qpu_busy_.find(node); it != qpu_busy_.end()) {
    for (const auto& iv : it->second) busy += overlap(iv.start, iv.end);
  }
  for (const auto& [name, pod] : pods_) {
    if (pod.node == node && pod.running_since && requests_qpu(pod.requests)) busy += overlap(*pod.running_since, hi);
  }
  return std::min(1.0, static_cast<double>(busy) / static_cast<double>(window_ms_));
}

std::vector<MetricFamily> MetricsRegistry::families() const {
  std::lock_guard lock(mu_);
  std::vector<MetricFamily> out;
  auto scalar = [&](const char* name, MetricKind kind, const char* help, double v) {
    out.push_back(MetricFamily{name, kind, help, {MetricSample{name, {}, v}}});
  };
  scalar("q8s_jobs_submitted_total", MetricKind::Counter, "Jobs accepted by the control plane.",
         static_cast<double>(jobs_submitted_));
  scalar("q8s_jobs_completed_total", MetricKind::Counter, "Jobs that reached Completed.",
         static_cast<double>(jobs_completed_));
  scalar("q8s_jobs_failed_total", MetricKind::Counter, "Jobs that reached Failed.", static_cast<double>(jobs_failed_));
  scalar("q8s_pods_pending", MetricKind::Gauge, "Pods in phase Pending.", static_cast<double>(pending_));
  scalar("q8s_pods_running", MetricKind::Gauge, "Pods in phase Running.", static_cast<double>(running_));

  MetricFamily alloc{"q8s_node_allocatable", MetricKind::Gauge, "Unreserved capacity per node and resource.", {}};
  for (const auto& [node, cap] : capacity_) {
    for (const auto& [key, qty] : cap) {
      int64_t used = 0;
      if (auto u = used_.find(node); u != used_.end() && u->second.count(key)) used = u->second.at(key);
      alloc.samples.push_back(MetricSample{alloc.name, {{"node", node}, {"resource", key}},
                                           static_cast<double>(std::max<int64_t>(0, qty - used))});
    }
  }
  out.push_back(std::move(alloc));

  MetricFamily hist{"q8s_pod_duration_seconds", MetricKind::Histogram,
                    "Time from binding to a terminal phase, in cluster-clock seconds.", {}};
  int64_t cumulative = 0;
  for (size_t b = 0; b <= kDurationBounds.size(); ++b) {
    cumulative += buckets_[b];
    std::string le = b < kDurationBounds.size() ? format_metric_value(kDurationBounds[b]) : "+Inf";
    hist.samples.push_back(MetricSample{hist.name + "_bucket", {{"le", le}}, static_cast<double>(cumulative)});
  }
  hist.samples.push_back(MetricSample{hist.name + "_sum", {}, duration_sum_});
  hist.samples.push_back(MetricSample{hist.name + "_count", {}, static_cast<double>(duration_count_)});
  out.push_back(std::move(hist));

  MetricFamily util{"q8s_qpu_utilization_ratio", MetricKind::Gauge,
                    "Fraction of the trailing window a QPU node spent running QPU pods.", {}};
  for (const auto& [node, cap] : capacity_) {
    if (qpu_node(cap)) util.samples.push_back(MetricSample{util.name, {{"node", node}}, utilization(node)});
  }
  out.push_back(std::move(util));
  return out;
}

int64_t MetricsRegistry::pods_pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}
int64_t MetricsRegistry::pods_running() const {
  std::lock_guard lock(mu_);
  return running_;
}
int64_t MetricsRegistry::pods_terminal() const {
  std::lock_guard lock(mu_);
  return terminal_;
}
int64_t MetricsRegistry::pods_created() const {
  std::lock_guard lock(mu_);
  return created_;
}
int64_t MetricsRegistry::pods_deleted() const {
  std::lock_guard lock(mu_);
  return deleted_;
}

void record_event_metrics(const EventRecord& ev, MetricsRegistry& registry) { registry.record(ev); }

std::string render_exposition(std::vector<MetricFamily> families) {
  std::sort(families.begin(), families.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  std::string out;
  for (const auto& f : families) {
    out += "# HELP " + f.name + " " + escape_help(f.help) + "\n";
    out += "# TYPE " + f.name + " " + std::string(kind_name(f.kind)) + "\n";
    for (const auto& s : f.samples) {
      out += s.name;
      if (!s.labels.empty()) {
        out += "{";
        for (size_t i = 0; i < s.labels.size(); ++i) {
          if (i) out += ",";
          out += s.labels[i].first + "=\"" + escape_label(s.labels[i].second) + "\"";
        }
        out += "}";
      }
      out += " " + format_metric_value(s.value) + "\n";
    }
  }
  return out;
}

std::string render_exposition(const MetricsRegistry& registry) { return render_exposition(registry.families()); }

}  // namespace q8s
