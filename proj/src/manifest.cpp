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

#include "q8s/manifest.hpp"

#include <charconv>
#include <ctime>
#include <limits>
#include <algorithm>

namespace q8s {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void violation(Position pos, const std::string& message) {
  throw PositionedError("InvariantViolation", pos, message);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// A mapping checked against the schema's known keys on construction.
class Fields {
 public:
  Fields(const yaml::Node& node, std::string path, bool strict, std::initializer_list<std::string_view> known)
      : node_(node), path_(std::move(path)) {
    if (!node.is_mapping()) violation(node.position(), path_ + ": expected a mapping");
    if (!strict) return;
    for (const auto& e : node.entries()) {
      if (std::find(known.begin(), known.end(), e.key) == known.end()) {
        throw PositionedError("UnknownField", e.key_pos,
                              "unknown field '" + e.key + "' in " +
                                  (path_.empty() ? std::string("document") : path_));
      }
    }
  }

  const yaml::Node* get(const std::string& key) const {
    const yaml::Node* n = node_.find(key);
    if (n && n->is_null()) return nullptr;
    return n;
  }

  const yaml::Node& require(const std::string& key) const {
    const yaml::Node* n = get(key);
    if (!n) violation(node_.position(), "missing required field '" + join(path_, key) + "'");
    return *n;
  }

  std::string path(const std::string& key) const { return join(path_, key); }

 private:
  const yaml::Node& node_;
  std::string path_;
};

const std::string& scalar(const yaml::Node& n, const std::string& path) {
  if (!n.is_scalar()) violation(n.position(), path + ": expected a scalar");
  return n.value();
}

int64_t integer(const yaml::Node& n, const std::string& path, int64_t lo, int64_t hi) {
  const std::string& s = scalar(n, path);
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || s.front() == '+') {
    violation(n.position(), path + ": expected an integer, got '" + s + "'");
  }
  if (v < lo || v > hi) {
    violation(n.position(), path + ": " + std::to_string(v) + " is outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
  }
  return v;
}

double real(const yaml::Node& n, const std::string& path, double lo, double hi) {
  const std::string& s = scalar(n, path);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    violation(n.position(), path + ": expected a number, got '" + s + "'");
  }
  if (!(v >= lo && v <= hi)) violation(n.position(), path + ": " + s + " is out of range");
  return v;
}

LabelMap string_map(const yaml::Node& n, const std::string& path) {
  if (!n.is_mapping()) violation(n.position(), path + ": expected a mapping");
  LabelMap out;
  for (const auto& e : n.entries()) {
    if (e.key.empty()) violation(e.key_pos, path + ": empty key");
    out[e.key] = e.value.is_null() ? std::string() : scalar(e.value, join(path, e.key));
  }
  return out;
}

ResourceMap resource_map(const yaml::Node& n, const std::string& path) {
  if (!n.is_mapping()) violation(n.position(), path + ": expected a mapping");
  ResourceMap out;
  for (const auto& e : n.entries()) {
    if (e.key.empty()) violation(e.key_pos, path + ": empty resource key");
    std::string p = join(path, e.key);
    if (e.value.is_null()) violation(e.key_pos, p + ": missing quantity");
    const std::string& s = scalar(e.value, p);
    bool digits = !s.empty();
    for (char c : s) digits = digits && c >= '0' && c <= '9';
    if (!digits) {
      violation(e.value.position(),
                p + ": quantity must be a non-negative integer without units, got '" + s + "'");
    }
    out[e.key] = integer(e.value, p, 0, std::numeric_limits<int64_t>::max());
  }
  return out;
}

std::vector<std::string> string_list(const yaml::Node& n, const std::string& path) {
  if (!n.is_sequence()) violation(n.position(), path + ": expected a sequence");
  std::vector<std::string> out;
  for (const auto& item : n.items()) out.push_back(scalar(item, path));
  return out;
}

Instant timestamp(const yaml::Node& n, const std::string& path) {
  auto t = parse_timestamp(scalar(n, path));
  if (!t) violation(n.position(), path + ": expected an RFC 3339 UTC timestamp");
  return *t;
}

ObjectMeta decode_meta(const yaml::Node& n, bool strict, bool name_optional, std::string* owner_job) {
  Fields f(n, "metadata", strict, {"name", "labels", "creationTimestamp", "ownerJob"});
  ObjectMeta meta;
  if (const auto* name = f.get("name")) {
    meta.name = scalar(*name, "metadata.name");
    if (!is_valid_name(meta.name)) {
      violation(name->position(), "metadata.name '" + meta.name +
                                      "' must be a DNS label ([a-z0-9]([-a-z0-9]*[a-z0-9])?, at most 63 chars)");
    }
  } else if (name_optional) {
    meta.needs_name = true;
  } else {
    violation(n.position(), "missing required field 'metadata.name'");
  }
  if (const auto* labels = f.get("labels")) meta.labels = string_map(*labels, "metadata.labels");
  if (const auto* ts = f.get("creationTimestamp")) {
    meta.creation_timestamp = timestamp(*ts, "metadata.creationTimestamp");
  }
  if (owner_job) {
    if (const auto* owner = f.get("ownerJob")) *owner_job = scalar(*owner, "metadata.ownerJob");
  }
  return meta;
}

void expect_api_version(Fields& top, const yaml::Node& doc, const std::string& expected) {
  const yaml::Node* v = top.get("apiVersion");
  if (!v) violation(doc.position(), "missing required field 'apiVersion'");
  if (scalar(*v, "apiVersion") != expected) {
    violation(v->position(), "apiVersion must be '" + expected + "', got '" + v->value() + "'");
  }
}

ResourceRequirements decode_resources(const yaml::Node& n, const std::string& path, bool strict) {
  Fields f(n, path, strict, {"requests", "limits"});
  ResourceRequirements r;
  if (const auto* req = f.get("requests")) r.requests = resource_map(*req, f.path("requests"));
  if (const auto* lim = f.get("limits")) r.limits = resource_map(*lim, f.path("limits"));
  for (const auto& [key, qty] : r.requests) {
    auto it = r.limits.find(key);
    if (it == r.limits.end() || it->second != qty) {
      violation(n.position(), path + ": extended resource '" + key + "' must have equal request and limit");
    }
  }
  for (const auto& [key, qty] : r.limits) {
    if (!r.requests.count(key)) {
      violation(n.position(), path + ": extended resource '" + key + "' has a limit but no request");
    }
  }
  return r;
}

struct PodBody {
  LabelMap node_selector;
  TaskRef task;
  ResourceRequirements resources;
};

PodBody decode_pod_body(Fields& f, const yaml::Node& spec, bool strict) {
  PodBody body;
  if (const auto* sel = f.get("nodeSelector")) body.node_selector = string_map(*sel, f.path("nodeSelector"));
  const yaml::Node& containers = f.require("containers");
  std::string cpath = f.path("containers");
  if (!containers.is_sequence()) violation(containers.position(), cpath + ": expected a sequence");
  if (containers.items().empty()) violation(containers.position(), cpath + ": exactly one container is required");
  if (containers.items().size() > 1) {
    violation(containers.items()[1].position(), cpath + ": multi-container pods are not supported");
  }
  const yaml::Node& c = containers.items().front();
  Fields cf(c, cpath + "[0]", strict, {"name", "image", "command", "args", "resources"});
  body.task.name = scalar(cf.require("name"), cf.path("name"));
  if (body.task.name.empty()) violation(c.position(), cf.path("name") + " must be nonempty");
  const yaml::Node& image = cf.require("image");
  body.task.image = scalar(image, cf.path("image"));
  if (body.task.image.empty()) violation(image.position(), cf.path("image") + " must be nonempty");
  if (const auto* cmd = cf.get("command")) body.task.command = string_list(*cmd, cf.path("command"));
  if (const auto* args = cf.get("args")) body.task.args = string_list(*args, cf.path("args"));
  if (const auto* res = cf.get("resources")) body.resources = decode_resources(*res, cf.path("resources"), strict);
  (void)spec;
  return body;
}

NodeSpec decode_node(const yaml::Node& doc, Fields& top, bool strict) {
  expect_api_version(top, doc, "v1");
  NodeSpec node;
  if (const auto* m = top.get("metadata")) {
    node.meta = decode_meta(*m, strict, true, nullptr);
  } else {
    node.meta.needs_name = true;
  }
  if (const auto* spec = top.get("spec")) {
    Fields sf(*spec, "spec", strict, {"backend"});
    if (const auto* b = sf.get("backend")) {
      Fields bf(*b, "spec.backend", strict, {"kind", "resourceKey", "readoutFlipProb", "speedFactor", "remote"});
      BackendBinding binding;
      const yaml::Node& kind = bf.require("kind");
      auto k = parse_backend_kind(scalar(kind, "spec.backend.kind"));
      if (!k) violation(kind.position(), "spec.backend.kind must be cpu-sim, gpu-sim or remote-qpu");
      binding.kind = *k;
      if (const auto* rk = bf.get("resourceKey")) binding.resource_key = scalar(*rk, bf.path("resourceKey"));
      if (const auto* p = bf.get("readoutFlipProb")) {
        binding.noise.readout_flip_prob = real(*p, bf.path("readoutFlipProb"), 0.0, 1.0);
      }
      if (const auto* s = bf.get("speedFactor")) {
        binding.speed_factor = real(*s, bf.path("speedFactor"), 0.0, std::numeric_limits<double>::max());
        if (binding.speed_factor <= 0) violation(s->position(), "spec.backend.speedFactor must be positive");
      }
      if (const auto* r = bf.get("remote")) {
        Fields rf(*r, "spec.backend.remote", strict,
                  {"endpoint", "submitLatencyMs", "failureProb", "queueDepthCap", "failFirst", "seed"});
        RemoteQpuConfig cfg;
        cfg.endpoint = scalar(rf.require("endpoint"), rf.path("endpoint"));
        if (const auto* v = rf.get("submitLatencyMs")) {
          cfg.submit_latency_ms = integer(*v, rf.path("submitLatencyMs"), 0, std::numeric_limits<int32_t>::max());
        }
        if (const auto* v = rf.get("failureProb")) cfg.failure_prob = real(*v, rf.path("failureProb"), 0.0, 1.0);
        if (const auto* v = rf.get("queueDepthCap")) {
          cfg.queue_depth_cap = static_cast<int>(integer(*v, rf.path("queueDepthCap"), 1, 1 << 20));
        }
        if (const auto* v = rf.get("failFirst")) {
          cfg.fail_first = static_cast<int>(integer(*v, rf.path("failFirst"), 0, 1 << 20));
        }
        if (const auto* v = rf.get("seed")) {
          cfg.seed = static_cast<uint64_t>(integer(*v, rf.path("seed"), 0, std::numeric_limits<int64_t>::max()));
        }
        binding.remote = cfg;
      }
      if (binding.remote.has_value() != (binding.kind == BackendKind::RemoteQpu)) {
        violation(b->position(), "spec.backend.remote must be present exactly when kind is remote-qpu");
      }
      node.backend = binding;
    }
  }
  if (const auto* status = top.get("status")) {
    Fields stf(*status, "status", strict, {"capacity"});
    if (const auto* cap = stf.get("capacity")) node.capacity = resource_map(*cap, "status.capacity");
  }
  bool has_qpu = false;
  for (const auto& [key, qty] : node.capacity) {
    if (is_qpu_resource(key)) {
      has_qpu = true;
      if (qty > 1) {
        violation(doc.position(), "status.capacity." + key + ": QPU capacity must be 0 or 1");
      }
    }
  }
  auto acc = node.meta.labels.find("accelerator");
  if (acc != node.meta.labels.end() && acc->second == "qpu" && !has_qpu) {
    violation(doc.position(), "node labelled accelerator=qpu must advertise a QPU capacity entry");
  }
  return node;
}

JobStatus decode_job_status(const yaml::Node& n, bool strict) {
  Fields f(n, "status", strict, {"phase", "attempts", "activePod", "retryAt"});
  JobStatus s;
  const yaml::Node& phase = f.require("phase");
  auto p = parse_job_phase(scalar(phase, "status.phase"));
  if (!p) violation(phase.position(), "status.phase must be Active, Completed or Failed");
  s.phase = *p;
  if (const auto* a = f.get("attempts")) s.attempts = static_cast<int>(integer(*a, "status.attempts", 0, 1 << 20));
  if (const auto* a = f.get("activePod")) s.active_pod = scalar(*a, "status.activePod");
  if (const auto* r = f.get("retryAt")) s.retry_at = timestamp(*r, "status.retryAt");
  return s;
}

PodStatus decode_pod_status(const yaml::Node& n, bool strict) {
  Fields f(n, "status", strict, {"phase", "nodeName", "exitCode", "boundAt", "startedAt", "finishedAt"});
  PodStatus s;
  const yaml::Node& phase = f.require("phase");
  auto p = parse_pod_phase(scalar(phase, "status.phase"));
  if (!p) violation(phase.position(), "status.phase must be Pending, Running, Succeeded or Failed");
  s.phase = *p;
  if (const auto* v = f.get("nodeName")) s.node_name = scalar(*v, "status.nodeName");
  if (const auto* v = f.get("exitCode")) {
    s.exit_code = static_cast<int>(integer(*v, "status.exitCode", std::numeric_limits<int32_t>::min(),
                                           std::numeric_limits<int32_t>::max()));
  }
  if (const auto* v = f.get("boundAt")) s.bound_at = timestamp(*v, "status.boundAt");
  if (const auto* v = f.get("startedAt")) s.started_at = timestamp(*v, "status.startedAt");
  if (const auto* v = f.get("finishedAt")) s.finished_at = timestamp(*v, "status.finishedAt");
  return s;
}

JobSpec decode_job(const yaml::Node& doc, Fields& top, bool strict) {
  expect_api_version(top, doc, "batch/v1");
  JobSpec job;
  const yaml::Node& m = top.require("metadata");
  job.meta = decode_meta(m, strict, false, nullptr);
  if (job.meta.name.size() > kMaxJobNameLength) {
    violation(m.position(), "metadata.name: job names are limited to " + std::to_string(kMaxJobNameLength) +
                                " characters so pod names fit in 63");
  }
  const yaml::Node& spec = top.require("spec");
  Fields sf(spec, "spec", strict, {"backoffLimit", "priority", "template"});
  if (const auto* b = sf.get("backoffLimit")) {
    job.backoff_limit = static_cast<int>(integer(*b, "spec.backoffLimit", 0, kMaxBackoffLimit));
  }
  if (const auto* p = sf.get("priority")) {
    job.priority = static_cast<int>(integer(*p, "spec.priority", std::numeric_limits<int32_t>::min(),
                                            std::numeric_limits<int32_t>::max()));
  }
  const yaml::Node& tmpl = sf.require("template");
  Fields tf(tmpl, "spec.template", strict, {"spec"});
  const yaml::Node& pod_spec = tf.require("spec");
  Fields pf(pod_spec, "spec.template.spec", strict, {"nodeSelector", "containers"});
  PodBody body = decode_pod_body(pf, pod_spec, strict);
  job.pod_template = PodTemplate{std::move(body.node_selector), std::move(body.task), std::move(body.resources)};
  if (const auto* st = top.get("status")) job.status = decode_job_status(*st, strict);
  return job;
}

PodSpec decode_pod(const yaml::Node& doc, Fields& top, bool strict) {
  expect_api_version(top, doc, "v1");
  PodSpec pod;
  pod.meta = decode_meta(top.require("metadata"), strict, false, &pod.owner_job);
  const yaml::Node& spec = top.require("spec");
  Fields sf(spec, "spec", strict, {"nodeSelector", "containers"});
  PodBody body = decode_pod_body(sf, spec, strict);
  pod.node_selector = std::move(body.node_selector);
  pod.task = std::move(body.task);
  pod.resources = std::move(body.resources);
  if (const auto* st = top.get("status")) pod.status = decode_pod_status(*st, strict);
  return pod;
}

// JSON -> YAML node, so the API decodes through the same schema code.
yaml::Node from_json(const ordered_json& j) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      yaml::Node map = yaml::Node::mapping();
      for (const auto& [k, v] : j.items()) map.set(k, from_json(v));
      return map;
    }
    case ordered_json::value_t::array: {
      yaml::Node seq = yaml::Node::sequence();
      for (const auto& v : j) seq.push_back(from_json(v));
      return seq;
    }
    case ordered_json::value_t::string: return yaml::Node::scalar(j.get<std::string>(), true);
    case ordered_json::value_t::null: return yaml::Node::null();
    case ordered_json::value_t::number_float: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, j.get<double>());
      return yaml::Node::scalar(std::string(buf, res.ptr));
    }
    default: return yaml::Node::scalar(j.dump());
  }
}

yaml::Node to_yaml(const ordered_json& j) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      yaml::Node map = yaml::Node::mapping();
      for (const auto& [k, v] : j.items()) map.set(k, to_yaml(v));
      return map;
    }
    case ordered_json::value_t::array: {
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && v.is_string();
      yaml::Node seq = yaml::Node::sequence({}, scalars);
      for (const auto& v : j) seq.push_back(to_yaml(v));
      return seq;
    }
    default: return from_json(j);
  }
}

ordered_json json_map(const ResourceMap& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

ordered_json json_map(const LabelMap& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

ordered_json meta_json(const ObjectMeta& meta, const std::string& owner_job = {}) {
  ordered_json j = ordered_json::object();
  if (!meta.needs_name || !meta.name.empty()) j["name"] = meta.name;
  if (!meta.labels.empty()) j["labels"] = json_map(meta.labels);
  if (meta.creation_timestamp) j["creationTimestamp"] = format_timestamp(*meta.creation_timestamp);
  if (!owner_job.empty()) j["ownerJob"] = owner_job;
  return j;
}

ordered_json pod_body_json(const LabelMap& selector, const TaskRef& task, const ResourceRequirements& res) {
  ordered_json spec = ordered_json::object();
  if (!selector.empty()) spec["nodeSelector"] = json_map(selector);
  ordered_json c = ordered_json::object();
  c["name"] = task.name;
  c["image"] = task.image;
  if (!task.command.empty()) c["command"] = task.command;
  if (!task.args.empty()) c["args"] = task.args;
  if (!res.requests.empty() || !res.limits.empty()) {
    ordered_json r = ordered_json::object();
    if (!res.requests.empty()) r["requests"] = json_map(res.requests);
    if (!res.limits.empty()) r["limits"] = json_map(res.limits);
    c["resources"] = r;
  }
  spec["containers"] = ordered_json::array({c});
  return spec;
}

ordered_json node_json(const NodeSpec& node) {
  ordered_json j = ordered_json::object();
  j["apiVersion"] = "v1";
  j["kind"] = "Node";
  ordered_json meta = meta_json(node.meta);
  if (!meta.empty()) j["metadata"] = meta;
  if (node.backend) {
    const BackendBinding& b = *node.backend;
    ordered_json bj = ordered_json::object();
    bj["kind"] = std::string(to_string(b.kind));
    if (!b.resource_key.empty()) bj["resourceKey"] = b.resource_key;
    if (b.noise.readout_flip_prob != 0.0) bj["readoutFlipProb"] = b.noise.readout_flip_prob;
    if (b.speed_factor != 1.0) bj["speedFactor"] = b.speed_factor;
    if (b.remote) {
      const RemoteQpuConfig& r = *b.remote;
      ordered_json rj = ordered_json::object();
      rj["endpoint"] = r.endpoint;
      rj["submitLatencyMs"] = r.submit_latency_ms;
      rj["failureProb"] = r.failure_prob;
      rj["queueDepthCap"] = r.queue_depth_cap;
      if (r.fail_first != 0) rj["failFirst"] = r.fail_first;
      if (r.seed != 0) rj["seed"] = r.seed;
      bj["remote"] = rj;
    }
    j["spec"] = {{"backend", bj}};
  }
  if (!node.capacity.empty()) j["status"] = {{"capacity", json_map(node.capacity)}};
  return j;
}

ordered_json job_json(const JobSpec& job) {
  ordered_json j = ordered_json::object();
  j["apiVersion"] = "batch/v1";
  j["kind"] = "Job";
  j["metadata"] = meta_json(job.meta);
  ordered_json spec = ordered_json::object();
  spec["backoffLimit"] = job.backoff_limit;
  if (job.priority != 0) spec["priority"] = job.priority;
  const PodTemplate& t = job.pod_template;
  spec["template"] = {{"spec", pod_body_json(t.node_selector, t.task, t.resources)}};
  j["spec"] = spec;
  if (job.status) {
    const JobStatus& s = *job.status;
    ordered_json st = ordered_json::object();
    st["phase"] = std::string(to_string(s.phase));
    st["attempts"] = s.attempts;
    if (!s.active_pod.empty()) st["activePod"] = s.active_pod;
    if (s.retry_at) st["retryAt"] = format_timestamp(*s.retry_at);
    j["status"] = st;
  }
  return j;
}

ordered_json pod_json(const PodSpec& pod) {
  ordered_json j = ordered_json::object();
  j["apiVersion"] = "v1";
  j["kind"] = "Pod";
  j["metadata"] = meta_json(pod.meta, pod.owner_job);
  j["spec"] = pod_body_json(pod.node_selector, pod.task, pod.resources);
  if (pod.status) {
    const PodStatus& s = *pod.status;
    ordered_json st = ordered_json::object();
    st["phase"] = std::string(to_string(s.phase));
    if (!s.node_name.empty()) st["nodeName"] = s.node_name;
    if (s.exit_code) st["exitCode"] = *s.exit_code;
    if (s.bound_at) st["boundAt"] = format_timestamp(*s.bound_at);
    if (s.started_at) st["startedAt"] = format_timestamp(*s.started_at);
    if (s.finished_at) st["finishedAt"] = format_timestamp(*s.finished_at);
    j["status"] = st;
  }
  return j;
}

}  // namespace

ClusterObject decode_object(const yaml::Node& doc, const ParseOptions& opts) {
  if (!doc.is_mapping()) violation(doc.position(), "document must be a mapping");
  Fields top(doc, "", opts.strict, {"apiVersion", "kind", "metadata", "spec", "status"});
  const yaml::Node* kind = top.get("kind");
  if (!kind) violation(doc.position(), "missing required field 'kind'");
  const std::string& k = scalar(*kind, "kind");
  ClusterObject obj;
  if (k == "Node") {
    obj = decode_node(doc, top, opts.strict);
  } else if (k == "Job") {
    obj = decode_job(doc, top, opts.strict);
  } else if (k == "Pod") {
    obj = decode_pod(doc, top, opts.strict);
  } else {
    throw PositionedError("UnknownKind", kind->position(), "unknown kind '" + k + "'");
  }
  return obj;
}

ClusterObject decode_object(const ordered_json& doc, const ParseOptions& opts) {
  return decode_object(from_json(doc), opts);
}

std::vector<ClusterObject> parse_manifest(std::string_view text, const ParseOptions& opts) {
  std::vector<ClusterObject> out;
  for (const auto& doc : yaml::parse_stream(text)) out.push_back(decode_object(doc, opts));
  return out;
}

ordered_json to_json(const ClusterObject& obj) {
  switch (obj.index()) {
    case 0: return node_json(std::get<NodeSpec>(obj));
    case 1: return job_json(std::get<JobSpec>(obj));
    default: return pod_json(std::get<PodSpec>(obj));
  }
}

std::string serialize_manifest(const ClusterObject& obj) { return yaml::emit(to_yaml(to_json(obj))); }

PodSpec render_pod_from_template(const JobSpec& job, int attempt) {
  PodSpec pod;
  pod.meta.name = job.meta.name + "-" + std::to_string(attempt);
  pod.owner_job = job.meta.name;
  pod.node_selector = job.pod_template.node_selector;
  pod.task = job.pod_template.task;
  pod.resources = job.pod_template.resources;
  return pod;
}

std::string format_timestamp(Instant t) {
  int64_t secs = t >= 0 ? t / 1000 : (t - 999) / 1000;
  int ms = static_cast<int>(t - secs * 1000);
  std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
  return buf;
}

std::optional<Instant> parse_timestamp(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  int consumed = 0;
  std::string s(text);
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                      &tm.tm_min, &tm.tm_sec, &consumed);
  if (n != 6) return std::nullopt;
  std::string_view rest = text.substr(static_cast<size_t>(consumed));
  if (!rest.empty() && rest.front() == '.') {
    if (rest.size() < 5) return std::nullopt;
    for (int i = 1; i <= 3; ++i) {
      if (rest[i] < '0' || rest[i] > '9') return std::nullopt;
      ms = ms * 10 + (rest[i] - '0');
    }
    rest.remove_prefix(4);
  }
  if (rest != "Z") return std::nullopt;
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<Instant>(timegm(&tm)) * 1000 + ms;
}

}  // namespace q8s
