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

#include "q8s/runtime.hpp"

#include <cmath>
#include <thread>

#include "q8s/error.hpp"
#include "q8s/remote.hpp"
#include "q8s/simulator.hpp"

namespace q8s {

using nlohmann::ordered_json;

namespace {

struct TaskFailure {
  int code;
  std::string message;
};

Counts run_remote(const Circuit& circuit, int64_t shots, uint64_t seed, const RemoteQpuConfig& cfg,
                  const ExecutionContext& ctx, std::vector<std::string>& logs) {
  try {
    remote::RemoteQpuClient client(cfg.endpoint);
    auto submitted = client.submit(unparse_qasm(circuit), shots, seed);
    if (!submitted.accepted) throw TaskFailure{exit_code::kRemoteRejected, "remote QPU rejected task: " + submitted.detail};
    logs.push_back("submitted to remote QPU as job " + submitted.detail);
    const auto deadline = std::chrono::steady_clock::now() + ctx.remote_timeout;
    while (true) {
      auto st = client.status(submitted.detail);
      if (st.state == remote::RemoteState::Completed) {
        Counts counts;
        counts.shots = shots;
        const auto doc = nlohmann::json::parse(st.detail);
        for (auto& [k, v] : doc.items()) counts.histogram[k] = v.get<int64_t>();
        return counts;
      }
      if (st.state == remote::RemoteState::Failed) {
        throw TaskFailure{exit_code::kRemoteUnavailable, "remote QPU job failed: " + st.detail};
      }
      if (std::chrono::steady_clock::now() > deadline) {
        throw TaskFailure{exit_code::kRemoteUnavailable, "remote QPU job timed out"};
      }
      std::this_thread::sleep_for(ctx.remote_poll);
    }
  } catch (const Error& e) {
    throw TaskFailure{exit_code::kRemoteUnavailable, e.what()};
  } catch (const nlohmann::json::exception& e) {
    throw TaskFailure{exit_code::kRemoteUnavailable, std::string("bad counts from remote QPU: ") + e.what()};
  }
}

std::string counts_text(const Counts& counts) {
  std::string out = "{";
  for (const auto& [k, v] : counts.histogram) {
    if (out.size() > 1) out += ", ";
    out += "'" + k + "': " + std::to_string(v);
  }
  return out + "}";
}

}  // namespace

BackendBinding effective_backend(const NodeSpec& node, const std::optional<RemoteQpuConfig>& default_remote) {
  if (node.backend) return *node.backend;
  BackendBinding b;
  for (const auto& [key, qty] : node.capacity) {
    if (is_qpu_resource(key) && default_remote) {
      b.kind = BackendKind::RemoteQpu;
      b.resource_key = key;
      b.remote = default_remote;
      return b;
    }
  }
  if (node.capacity.count("nvidia.com/gpu")) {
    b.kind = BackendKind::GpuSim;
    b.resource_key = "nvidia.com/gpu";
  }
  return b;
}

Instant simulated_duration_ms(const Circuit& circuit, int64_t shots, double speed_factor) {
  double ms = (static_cast<double>(circuit.gate_count()) + 0.01 * static_cast<double>(shots)) / speed_factor;
  return static_cast<Instant>(std::ceil(ms - 1e-9));
}

ExecutionOutcome execute_pod(const PodSpec& pod, const BackendBinding& backend, const ExecutionContext& ctx,
                             Xoshiro256& rng) {
  ExecutionOutcome out;
  const uint64_t fresh_seed = rng.next();
  try {
    TaskBundle bundle;
    RunOverrides overrides;
    try {
      bundle = resolve_bundle(pod.task.image, ctx.registry, pod.task.command);
      overrides = parse_run_args(pod.task.args);
    } catch (const Error& e) {
      throw TaskFailure{exit_code::kBundleError, e.code() + ": " + e.what()};
    }
    out.logs.push_back("resolved image " + pod.task.image + " to bundle " + bundle.image.name + "/" +
                       bundle.image.tag + (bundle.entry.empty() ? "" : " entry " + bundle.entry));
    const int64_t shots = overrides.shots.value_or(bundle.shots);
    const uint64_t seed = overrides.seed ? *overrides.seed : bundle.seed.value_or(fresh_seed);
    out.shots = shots;
    out.logs.push_back("executing " + std::to_string(bundle.circuit.num_qubits) + "-qubit circuit with " +
                       std::to_string(bundle.circuit.gate_count()) + " gates, " + std::to_string(shots) +
                       " shots on " + std::string(to_string(backend.kind)));

    Counts counts;
    if (backend.kind == BackendKind::RemoteQpu) {
      if (!backend.remote) throw TaskFailure{exit_code::kRemoteUnavailable, "node has no remote QPU endpoint"};
      counts = run_remote(bundle.circuit, shots, seed, *backend.remote, ctx, out.logs);
    } else {
      try {
        counts = run_circuit(bundle.circuit, shots, seed, backend.noise);
      } catch (const Error& e) {
        throw TaskFailure{exit_code::kCircuitError, e.code() + ": " + e.what()};
      }
    }
    out.duration_ms = simulated_duration_ms(bundle.circuit, shots, backend.speed_factor);
    if (backend.remote) out.duration_ms += backend.remote->submit_latency_ms;

    ordered_json doc;
    doc["backend"] = std::string(to_string(backend.kind));
    doc["shots"] = shots;
    doc["counts"] = counts.histogram;
    doc["duration_ms"] = out.duration_ms;
    doc["seed"] = seed;
    out.logs.push_back("Total counts: " + counts_text(counts));
    out.logs.push_back(doc.dump());
    out.result = std::move(doc);
  } catch (const TaskFailure& f) {
    out.exit_code = f.code;
    out.logs.push_back("error: " + f.message);
  }
  return out;
}

std::vector<LogRecord> collect_logs(const std::string& pod, const ClusterStore& store, int64_t since_seq) {
  return store.logs(pod, since_seq);
}

}  // namespace q8s
