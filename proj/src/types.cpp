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

#include "q8s/types.hpp"

namespace q8s {

bool is_qpu_resource(std::string_view key) {
  size_t slash = key.rfind('/');
  std::string_view last = slash == std::string_view::npos ? key : key.substr(slash + 1);
  return last == "qpu";
}

bool is_valid_name(std::string_view name) {
  if (name.empty() || name.size() > 63) return false;
  auto alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!alnum(name.front()) || !alnum(name.back())) return false;
  for (char c : name) {
    if (!alnum(c) && c != '-') return false;
  }
  return true;
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::CpuSim: return "cpu-sim";
    case BackendKind::GpuSim: return "gpu-sim";
    case BackendKind::RemoteQpu: return "remote-qpu";
  }
  return "cpu-sim";
}

std::optional<BackendKind> parse_backend_kind(std::string_view text) {
  if (text == "cpu-sim") return BackendKind::CpuSim;
  if (text == "gpu-sim") return BackendKind::GpuSim;
  if (text == "remote-qpu") return BackendKind::RemoteQpu;
  return std::nullopt;
}

std::string_view to_string(PodPhase phase) {
  switch (phase) {
    case PodPhase::Pending: return "Pending";
    case PodPhase::Running: return "Running";
    case PodPhase::Succeeded: return "Succeeded";
    case PodPhase::Failed: return "Failed";
  }
  return "Pending";
}

std::string_view to_string(JobPhase phase) {
  switch (phase) {
    case JobPhase::Active: return "Active";
    case JobPhase::Completed: return "Completed";
    case JobPhase::Failed: return "Failed";
  }
  return "Active";
}

std::optional<PodPhase> parse_pod_phase(std::string_view text) {
  for (auto p : {PodPhase::Pending, PodPhase::Running, PodPhase::Succeeded, PodPhase::Failed}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::optional<JobPhase> parse_job_phase(std::string_view text) {
  for (auto p : {JobPhase::Active, JobPhase::Completed, JobPhase::Failed}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view kind_of(const ClusterObject& obj) {
  switch (obj.index()) {
    case 0: return "Node";
    case 1: return "Job";
    default: return "Pod";
  }
}

const ObjectMeta& meta_of(const ClusterObject& obj) {
  return std::visit([](const auto& o) -> const ObjectMeta& { return o.meta; }, obj);
}

}  // namespace q8s
