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

// Invariant checks that read only the raw event log. They keep their own
// bookkeeping and never consult ClusterState.

#include <algorithm>
#include <climits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "q8s/store.hpp"

namespace q8s::testkit {

struct HistoryFacts {
  /// First violation found, empty if none.
  std::string violation;
  std::vector<std::string> bind_order;
  /// Per QPU pod (keyed name@createdSeq): seq of PodBound and of its terminal
  /// transition, -1 while open.
  std::map<std::string, std::pair<int64_t, int64_t>> qpu_intervals;
};

inline bool qpu_key(const std::string& k) { return k.size() >= 3 && k.compare(k.size() - 3, 3, "qpu") == 0; }

inline HistoryFacts check_history(const std::vector<EventRecord>& events) {
  HistoryFacts f;
  std::map<std::string, std::map<std::string, int64_t>> capacity;
  std::map<std::string, std::map<std::string, int64_t>> requests;
  std::map<std::string, std::string> bound_to;
  std::map<std::string, std::string> phase;
  std::map<std::string, std::string> owner;
  std::set<std::string> ever_bound;
  // Pod names can be reused after deletion; intervals are keyed by name@createdSeq.
  std::map<std::string, int64_t> generation;
  auto key_of = [&](const std::string& pod) { return pod + "@" + std::to_string(generation[pod]); };
  std::map<std::string, std::string> interval_node;
  auto fail = [&](const EventRecord& ev, const std::string& why) {
    if (f.violation.empty()) f.violation = "seq " + std::to_string(ev.seq) + ": " + why;
  };
  auto release = [&](const std::string& pod, int64_t seq) {
    bound_to.erase(pod);
    auto it = f.qpu_intervals.find(key_of(pod));
    if (it != f.qpu_intervals.end() && it->second.second < 0) it->second.second = seq;
  };

  for (size_t i = 0; i < events.size(); ++i) {
    const EventRecord& ev = events[i];
    const auto& p = ev.payload;
    if (ev.seq != static_cast<int64_t>(i)) fail(ev, "seq not dense");
    switch (ev.kind) {
      case EventKind::NodeRegistered: {
        const auto& o = p["object"];
        std::map<std::string, int64_t> cap;
        if (o.contains("status")) {
          for (auto& [k, v] : o["status"]["capacity"].items()) cap[k] = v.get<int64_t>();
        }
        capacity[o["metadata"]["name"].get<std::string>()] = cap;
        break;
      }
      case EventKind::PodCreated: {
        const auto& o = p["object"];
        std::string name = o["metadata"]["name"].get<std::string>();
        std::map<std::string, int64_t> req;
        const auto& c = o["spec"]["containers"][0];
        if (c.contains("resources") && c["resources"].contains("requests")) {
          for (auto& [k, v] : c["resources"]["requests"].items()) req[k] = v.get<int64_t>();
        }
        requests[name] = req;
        phase[name] = "Pending";
        generation[name] = ev.seq;
        ever_bound.erase(name);
        if (o["metadata"].contains("ownerJob")) owner[name] = o["metadata"]["ownerJob"].get<std::string>();
        break;
      }
      case EventKind::PodBound: {
        std::string pod = p["pod"].get<std::string>(), node = p["node"].get<std::string>();
        if (!ever_bound.insert(pod).second) fail(ev, "pod " + pod + " bound twice");
        bound_to[pod] = node;
        f.bind_order.push_back(pod);
        for (const auto& [key, cap] : capacity[node]) {
          int64_t used = 0;
          for (const auto& [other, n] : bound_to) {
            if (n != node) continue;
            auto r = requests[other].find(key);
            if (r != requests[other].end()) used += r->second;
          }
          if (used > cap) fail(ev, "node " + node + " overcommitted on " + key);
          if (qpu_key(key) && cap == 1 && requests[pod].count(key) && requests[pod][key] > 0) {
            f.qpu_intervals[key_of(pod)] = {ev.seq, -1};
            interval_node[key_of(pod)] = node;
          }
        }
        break;
      }
      case EventKind::PodPhaseChanged: {
        std::string pod = p["pod"].get<std::string>(), to = p["phase"].get<std::string>();
        const std::string from = phase[pod];
        bool ok = (from == "Pending" && to == "Running" && bound_to.count(pod)) ||
                  (from == "Running" && (to == "Succeeded" || to == "Failed"));
        if (!ok) fail(ev, "pod " + pod + " moved " + from + " -> " + to);
        phase[pod] = to;
        if (to == "Succeeded" || to == "Failed") {
          release(pod, ev.seq);
        }
        break;
      }
      case EventKind::ObjectDeleted: {
        std::string kind = p["kind"].get<std::string>(), name = p["name"].get<std::string>();
        if (kind == "Pod") release(name, ev.seq);
        if (kind == "Job") {
          for (const auto& [pod, job] : owner) {
            if (job == name) release(pod, ev.seq);
          }
        }
        if (kind == "Node") capacity.erase(name);
        break;
      }
      default:
        break;
    }
  }

  // Pairwise disjoint intervals per node, in event order.
  std::map<std::string, std::vector<std::pair<int64_t, int64_t>>> per_node;
  for (const auto& [key, iv] : f.qpu_intervals) per_node[interval_node[key]].push_back(iv);
  for (auto& [node, ivs] : per_node) {
    std::sort(ivs.begin(), ivs.end());
    for (size_t i = 1; i < ivs.size(); ++i) {
      int64_t prev_end = ivs[i - 1].second < 0 ? INT64_MAX : ivs[i - 1].second;
      if (ivs[i].first < prev_end && f.violation.empty()) {
        f.violation = "overlapping QPU intervals on node " + node;
      }
    }
  }
  return f;
}

}  // namespace q8s::testkit
