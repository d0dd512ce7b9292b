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

#include "q8s/store.hpp"

#include <algorithm>

#include "q8s/error.hpp"
#include "q8s/manifest.hpp"

namespace q8s {

using nlohmann::ordered_json;

namespace {

constexpr const char* kEventKindNames[] = {"NodeRegistered", "JobSubmitted",     "PodCreated",
                                           "PodBound",       "PodPhaseChanged",  "JobStatusChanged",
                                           "LogAppended",    "MetricSample",     "ObjectDeleted"};

[[noreturn]] void corrupt(int64_t seq, const std::string& why) {
  throw Error("CorruptHistory", "event seq " + std::to_string(seq) + ": " + why);
}

template <typename T>
T decode_as(const ordered_json& j) {
  ClusterObject obj = decode_object(j);
  if (!std::holds_alternative<T>(obj)) throw Error("CorruptHistory", "unexpected object kind");
  return std::get<T>(std::move(obj));
}

bool legal_transition(const PodStatus& st, PodPhase to) {
  switch (st.phase) {
    case PodPhase::Pending: return to == PodPhase::Running && !st.node_name.empty();
    case PodPhase::Running: return to == PodPhase::Succeeded || to == PodPhase::Failed;
    default: return false;
  }
}

std::string normalize_kind(std::string_view kind) {
  std::string k(kind);
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (!k.empty() && k.back() == 's') k.pop_back();
  if (k == "node") return "Node";
  if (k == "job") return "Job";
  if (k == "pod") return "Pod";
  return "";
}

}  // namespace

std::string_view to_string(EventKind kind) { return kEventKindNames[static_cast<int>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (int i = 0; i < static_cast<int>(std::size(kEventKindNames)); ++i) {
    if (text == kEventKindNames[i]) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::string encode_event(const EventRecord& ev) {
  ordered_json j;
  j["seq"] = ev.seq;
  j["ts"] = ev.timestamp;
  j["kind"] = std::string(to_string(ev.kind));
  j["payload"] = ev.payload;
  return j.dump();
}

EventRecord decode_event(std::string_view line) {
  ordered_json j = ordered_json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("CorruptHistory", "malformed JSON");
  try {
    EventRecord ev;
    ev.seq = j.at("seq").get<int64_t>();
    ev.timestamp = j.at("ts").get<int64_t>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error("CorruptHistory", "unknown event kind");
    ev.kind = *kind;
    ev.payload = j.at("payload");
    if (!ev.payload.is_object()) throw Error("CorruptHistory", "payload is not an object");
    return ev;
  } catch (const nlohmann::json::exception& e) {
    throw Error("CorruptHistory", e.what());
  }
}

Instant backoff_delay_ms(int attempts) {
  if (attempts >= 5) return 32'000;
  return Instant{1000} << std::max(attempts, 0);
}

bool selector_matches(const LabelMap& selector, const LabelMap& labels) {
  for (const auto& [k, v] : selector) {
    auto it = labels.find(k);
    if (it == labels.end() || it->second != v) return false;
  }
  return true;
}

ResourceMap ClusterState::allocatable(const std::string& node) const {
  ResourceMap free = nodes.at(node).capacity;
  for (const auto& [name, pod] : pods) {
    if (!pod.status || pod.status->node_name != node || is_terminal(pod.status->phase)) continue;
    for (const auto& [key, qty] : pod.resources.requests) {
      auto it = free.find(key);
      if (it != free.end()) it->second = std::max<int64_t>(0, it->second - qty);
    }
  }
  return free;
}

std::vector<std::string> ClusterState::pods_of(const std::string& job) const {
  std::vector<std::pair<int64_t, std::string>> owned;
  for (const auto& [name, pod] : pods) {
    if (pod.owner_job == job) owned.emplace_back(pod_created_seq.at(name), name);
  }
  std::sort(owned.begin(), owned.end());
  std::vector<std::string> out;
  for (auto& [seq, name] : owned) out.push_back(std::move(name));
  return out;
}

int ClusterState::priority_of(const PodSpec& pod) const {
  auto it = jobs.find(pod.owner_job);
  return it == jobs.end() ? 0 : it->second.priority;
}

void ClusterState::apply(const EventRecord& ev) {
  if (ev.seq != next_seq) corrupt(ev.seq, "expected seq " + std::to_string(next_seq));
  const ordered_json& p = ev.payload;
  try {
    switch (ev.kind) {
      case EventKind::NodeRegistered: {
        auto node = decode_as<NodeSpec>(p.at("object"));
        if (node.meta.name.empty() || nodes.count(node.meta.name)) corrupt(ev.seq, "duplicate or empty node name");
        node.meta.needs_name = false;
        node.meta.creation_timestamp = ev.timestamp;
        nodes.emplace(node.meta.name, std::move(node));
        break;
      }
      case EventKind::JobSubmitted: {
        auto job = decode_as<JobSpec>(p.at("object"));
        if (jobs.count(job.meta.name)) corrupt(ev.seq, "duplicate job " + job.meta.name);
        job.meta.creation_timestamp = ev.timestamp;
        job.status = JobStatus{};
        jobs.emplace(job.meta.name, std::move(job));
        break;
      }
      case EventKind::PodCreated: {
        auto pod = decode_as<PodSpec>(p.at("object"));
        const std::string name = pod.meta.name;
        if (pods.count(name)) corrupt(ev.seq, "duplicate pod " + name);
        if (!pod.owner_job.empty()) {
          auto it = jobs.find(pod.owner_job);
          if (it == jobs.end()) corrupt(ev.seq, "pod owner " + pod.owner_job + " does not exist");
          it->second.status->active_pod = name;
        }
        pod.meta.creation_timestamp = ev.timestamp;
        pod.status = PodStatus{};
        pods.emplace(name, std::move(pod));
        pod_created_seq[name] = ev.seq;
        logs[name];
        break;
      }
      case EventKind::PodBound: {
        const std::string pod_name = p.at("pod").get<std::string>();
        const std::string node_name = p.at("node").get<std::string>();
        auto it = pods.find(pod_name);
        if (it == pods.end() || !nodes.count(node_name)) corrupt(ev.seq, "binding references unknown object");
        PodStatus& st = *it->second.status;
        if (st.phase != PodPhase::Pending || !st.node_name.empty()) corrupt(ev.seq, "pod " + pod_name + " rebound");
        ResourceMap free = allocatable(node_name);
        for (const auto& [key, qty] : it->second.resources.requests) {
          auto f = free.find(key);
          if (qty > 0 && (f == free.end() || f->second < qty)) corrupt(ev.seq, "binding exceeds capacity");
        }
        st.node_name = node_name;
        st.bound_at = ev.timestamp;
        break;
      }
      case EventKind::PodPhaseChanged: {
        const std::string pod_name = p.at("pod").get<std::string>();
        auto it = pods.find(pod_name);
        if (it == pods.end()) corrupt(ev.seq, "unknown pod " + pod_name);
        auto to = parse_pod_phase(p.at("phase").get<std::string>());
        PodStatus& st = *it->second.status;
        if (!to || !legal_transition(st, *to)) corrupt(ev.seq, "illegal transition for pod " + pod_name);
        st.phase = *to;
        if (*to == PodPhase::Running) st.started_at = ev.timestamp;
        if (is_terminal(*to)) {
          st.finished_at = ev.timestamp;
          if (p.contains("exitCode")) st.exit_code = p["exitCode"].get<int>();
        }
        break;
      }
      case EventKind::JobStatusChanged: {
        const std::string job_name = p.at("job").get<std::string>();
        auto it = jobs.find(job_name);
        if (it == jobs.end()) corrupt(ev.seq, "unknown job " + job_name);
        auto phase = parse_job_phase(p.at("phase").get<std::string>());
        if (!phase) corrupt(ev.seq, "unknown job phase");
        JobStatus& st = *it->second.status;
        st.phase = *phase;
        st.attempts = p.at("attempts").get<int>();
        st.active_pod = p.at("activePod").get<std::string>();
        st.retry_at.reset();
        if (p.contains("retryAt")) st.retry_at = p["retryAt"].get<Instant>();
        break;
      }
      case EventKind::LogAppended: {
        const std::string pod_name = p.at("pod").get<std::string>();
        if (!pods.count(pod_name)) corrupt(ev.seq, "log for unknown pod " + pod_name);
        logs[pod_name].push_back(LogRecord{ev.seq, ev.timestamp, p.at("line").get<std::string>()});
        break;
      }
      case EventKind::MetricSample:
        break;
      case EventKind::ObjectDeleted: {
        const std::string kind = p.at("kind").get<std::string>();
        const std::string name = p.at("name").get<std::string>();
        auto erase_pod = [&](const std::string& pod) {
          pods.erase(pod);
          pod_created_seq.erase(pod);
          logs.erase(pod);
        };
        if (kind == "Node") {
          if (!nodes.erase(name)) corrupt(ev.seq, "delete of unknown node " + name);
        } else if (kind == "Job") {
          if (!jobs.count(name)) corrupt(ev.seq, "delete of unknown job " + name);
          for (const auto& pod : pods_of(name)) erase_pod(pod);
          jobs.erase(name);
        } else if (kind == "Pod") {
          if (!pods.count(name)) corrupt(ev.seq, "delete of unknown pod " + name);
          erase_pod(name);
        } else {
          corrupt(ev.seq, "delete of unknown kind " + kind);
        }
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() == "CorruptHistory" && std::string_view(e.what()).rfind("event seq", 0) == 0) throw;
    corrupt(ev.seq, e.what());
  } catch (const nlohmann::json::exception& e) {
    corrupt(ev.seq, e.what());
  }
  ++next_seq;
}

ClusterState replay(const std::vector<EventRecord>& events) {
  ClusterState state;
  for (const auto& ev : events) state.apply(ev);
  return state;
}

std::vector<EventRecord> read_event_log(const std::filesystem::path& path) {
  std::vector<EventRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const int64_t expected = static_cast<int64_t>(out.size());
    try {
      out.push_back(decode_event(line));
    } catch (const Error& e) {
      throw Error("CorruptHistory", "event seq " + std::to_string(expected) + ": " + e.what());
    }
  }
  return out;
}

ClusterStore::ClusterStore(Clock& clock) : clock_(clock) {}

ClusterStore::ClusterStore(Clock& clock, const std::filesystem::path& state_dir) : clock_(clock) {
  std::filesystem::create_directories(state_dir);
  const auto path = state_dir / "events.ndjson";
  events_ = read_event_log(path);
  state_ = replay(events_);
  sink_.emplace(path, std::ios::app);
  if (!*sink_) throw Error("IoError", "cannot open " + path.string() + " for appending");
}

const EventRecord& ClusterStore::commit(EventKind kind, ordered_json payload) {
  Instant ts = clock_.now();
  if (!events_.empty()) ts = std::max(ts, events_.back().timestamp);
  EventRecord ev{state_.next_seq, ts, kind, std::move(payload)};
  state_.apply(ev);
  events_.push_back(std::move(ev));
  const EventRecord& rec = events_.back();
  if (sink_) {
    *sink_ << encode_event(rec) << '\n';
    sink_->flush();
  }
  for (auto& [id, fn] : listeners_) fn(rec);
  cv_.notify_all();
  return rec;
}

const PodSpec& ClusterStore::pod_locked(const std::string& name) const {
  auto it = state_.pods.find(name);
  if (it == state_.pods.end()) throw Error("UnknownPod", "pod " + name + " not found");
  return it->second;
}

std::string ClusterStore::register_node(NodeSpec spec) {
  std::lock_guard lock(mu_);
  if (spec.meta.needs_name || spec.meta.name.empty()) spec.meta.name = "node-" + std::to_string(state_.next_seq);
  if (!is_valid_name(spec.meta.name)) throw Error("InvariantViolation", "invalid node name " + spec.meta.name);
  if (state_.nodes.count(spec.meta.name)) throw Error("DuplicateName", "node " + spec.meta.name + " already exists");
  spec.meta.needs_name = false;
  spec.meta.creation_timestamp.reset();
  commit(EventKind::NodeRegistered, {{"object", to_json(spec)}});
  return spec.meta.name;
}

void ClusterStore::create_pod_locked(PodSpec spec) {
  if (!is_valid_name(spec.meta.name)) throw Error("InvariantViolation", "invalid pod name " + spec.meta.name);
  if (state_.pods.count(spec.meta.name)) throw Error("DuplicateName", "pod " + spec.meta.name + " already exists");
  spec.status.reset();
  spec.meta.creation_timestamp.reset();
  commit(EventKind::PodCreated, {{"object", to_json(spec)}});
}

std::string ClusterStore::submit_job(JobSpec spec) {
  std::lock_guard lock(mu_);
  const std::string& name = spec.meta.name;
  if (!is_valid_name(name) || name.size() > kMaxJobNameLength) {
    throw Error("InvariantViolation", "invalid job name " + name);
  }
  if (state_.jobs.count(name)) throw Error("DuplicateName", "job " + name + " already exists");
  PodSpec pod = render_pod_from_template(spec, 0);
  if (state_.pods.count(pod.meta.name)) throw Error("DuplicateName", "pod " + pod.meta.name + " already exists");
  spec.status.reset();
  spec.meta.creation_timestamp.reset();
  commit(EventKind::JobSubmitted, {{"object", to_json(spec)}});
  create_pod_locked(std::move(pod));
  return name;
}

std::string ClusterStore::create_pod(PodSpec spec) {
  std::lock_guard lock(mu_);
  if (!spec.owner_job.empty()) {
    throw Error("InvariantViolation", "pods owned by a job are created by that job");
  }
  std::string name = spec.meta.name;
  create_pod_locked(std::move(spec));
  return name;
}

Binding ClusterStore::bind_pod(const std::string& pod_name, const std::string& node_name) {
  std::lock_guard lock(mu_);
  const PodSpec& pod = pod_locked(pod_name);
  auto node = state_.nodes.find(node_name);
  if (node == state_.nodes.end()) throw Error("UnknownNode", "node " + node_name + " not found");
  if (pod.status->phase != PodPhase::Pending || !pod.status->node_name.empty()) {
    throw Error("AlreadyBound", "pod " + pod_name + " is already bound");
  }
  if (!selector_matches(pod.node_selector, node->second.meta.labels)) {
    throw Error("SelectorMismatch", "pod " + pod_name + " does not select node " + node_name);
  }
  ResourceMap free = state_.allocatable(node_name);
  for (const auto& [key, qty] : pod.resources.requests) {
    auto f = free.find(key);
    int64_t have = f == free.end() ? 0 : f->second;
    if (qty > have) {
      throw Error("InsufficientCapacity", "node " + node_name + " has " + std::to_string(have) + " of " + key +
                                              ", pod " + pod_name + " requests " + std::to_string(qty));
    }
  }
  const EventRecord& ev = commit(EventKind::PodBound, {{"pod", pod_name}, {"node", node_name}});
  return Binding{pod_name, node_name, ev.timestamp};
}

PodSpec ClusterStore::transition_pod(const std::string& pod_name, PodPhase to, std::optional<int> exit_code) {
  std::lock_guard lock(mu_);
  const PodSpec& pod = pod_locked(pod_name);
  if (!legal_transition(*pod.status, to)) {
    throw Error("IllegalTransition", "pod " + pod_name + " cannot move from " +
                                         std::string(to_string(pod.status->phase)) + " to " +
                                         std::string(to_string(to)));
  }
  ordered_json p = {{"pod", pod_name}, {"phase", std::string(to_string(to))}};
  if (is_terminal(to)) p["exitCode"] = exit_code.value_or(to == PodPhase::Succeeded ? 0 : 1);
  commit(EventKind::PodPhaseChanged, std::move(p));
  return state_.pods.at(pod_name);
}

JobStatus ClusterStore::reconcile_job(const std::string& job_name) {
  std::lock_guard lock(mu_);
  auto it = state_.jobs.find(job_name);
  if (it == state_.jobs.end()) throw Error("UnknownJob", "job " + job_name + " not found");
  const JobSpec& job = it->second;
  const JobStatus st = *job.status;
  if (st.phase != JobPhase::Active) return st;

  auto status_event = [&](JobPhase phase, int attempts, const std::string& active, std::optional<Instant> retry) {
    ordered_json p = {{"job", job_name},
                      {"phase", std::string(to_string(phase))},
                      {"attempts", attempts},
                      {"activePod", active}};
    if (retry) p["retryAt"] = *retry;
    commit(EventKind::JobStatusChanged, std::move(p));
  };

  if (st.retry_at) {
    if (clock_.now() < *st.retry_at) return st;
    PodSpec next = render_pod_from_template(job, st.attempts);
    std::string next_name = next.meta.name;
    create_pod_locked(std::move(next));
    status_event(JobPhase::Active, st.attempts, next_name, std::nullopt);
    return *state_.jobs.at(job_name).status;
  }

  auto pod = state_.pods.find(st.active_pod);
  if (pod == state_.pods.end()) return st;
  const PodPhase phase = pod->second.status->phase;
  if (phase == PodPhase::Succeeded) {
    status_event(JobPhase::Completed, st.attempts, st.active_pod, std::nullopt);
  } else if (phase == PodPhase::Failed) {
    int failed = 0;
    for (const auto& name : state_.pods_of(job_name)) {
      if (state_.pods.at(name).status->phase == PodPhase::Failed) ++failed;
    }
    if (failed > job.backoff_limit) {
      status_event(JobPhase::Failed, failed, st.active_pod, std::nullopt);
    } else {
      status_event(JobPhase::Active, failed, st.active_pod, clock_.now() + backoff_delay_ms(failed));
    }
  }
  return *state_.jobs.at(job_name).status;
}

LogRecord ClusterStore::append_log(const std::string& pod, const std::string& line) {
  std::lock_guard lock(mu_);
  pod_locked(pod);
  commit(EventKind::LogAppended, {{"pod", pod}, {"line", line}});
  return state_.logs.at(pod).back();
}

void ClusterStore::record_sample(const std::string& name, const LabelMap& labels, double value) {
  std::lock_guard lock(mu_);
  commit(EventKind::MetricSample, {{"name", name}, {"labels", labels}, {"value", value}});
}

void ClusterStore::delete_object(std::string_view kind_text, const std::string& name) {
  std::lock_guard lock(mu_);
  const std::string kind = normalize_kind(kind_text);
  if (kind == "Node") {
    if (!state_.nodes.count(name)) throw Error("UnknownNode", "node " + name + " not found");
    for (const auto& [pod_name, pod] : state_.pods) {
      if (pod.status->node_name == name && !is_terminal(pod.status->phase)) {
        throw Error("InvariantViolation", "node " + name + " still hosts pod " + pod_name);
      }
    }
  } else if (kind == "Job") {
    if (!state_.jobs.count(name)) throw Error("UnknownJob", "job " + name + " not found");
  } else if (kind == "Pod") {
    const PodSpec& pod = pod_locked(name);
    auto job = state_.jobs.find(pod.owner_job);
    if (job != state_.jobs.end() && job->second.status->phase == JobPhase::Active) {
      throw Error("InvariantViolation", "pod " + name + " belongs to active job " + pod.owner_job);
    }
  } else {
    throw Error("UnknownKind", "unknown kind '" + std::string(kind_text) + "'");
  }
  commit(EventKind::ObjectDeleted, {{"kind", kind}, {"name", name}});
}

int ClusterStore::fail_orphans() {
  std::lock_guard lock(mu_);
  std::vector<std::string> orphans;
  for (const auto& [name, pod] : state_.pods) {
    if (pod.status->phase == PodPhase::Running) orphans.push_back(name);
  }
  for (const auto& name : orphans) {
    commit(EventKind::LogAppended, {{"pod", name}, {"line", "executor lost across control-plane restart"}});
    commit(EventKind::PodPhaseChanged, {{"pod", name}, {"phase", "Failed"}, {"exitCode", 1}});
  }
  return static_cast<int>(orphans.size());
}

ClusterState ClusterStore::snapshot() const {
  std::lock_guard lock(mu_);
  return state_;
}

ResourceMap ClusterStore::allocatable(const std::string& node) const {
  std::lock_guard lock(mu_);
  if (!state_.nodes.count(node)) throw Error("UnknownNode", "node " + node + " not found");
  return state_.allocatable(node);
}

std::vector<LogRecord> ClusterStore::logs(const std::string& pod, int64_t since_seq) const {
  std::lock_guard lock(mu_);
  pod_locked(pod);
  std::vector<LogRecord> out;
  for (const auto& rec : state_.logs.at(pod)) {
    if (rec.seq > since_seq) out.push_back(rec);
  }
  return out;
}

std::vector<EventRecord> ClusterStore::events(int64_t since_seq) const {
  std::lock_guard lock(mu_);
  auto first = static_cast<size_t>(std::clamp<int64_t>(since_seq + 1, 0, static_cast<int64_t>(events_.size())));
  return {events_.begin() + static_cast<std::ptrdiff_t>(first), events_.end()};
}

int64_t ClusterStore::next_seq() const {
  std::lock_guard lock(mu_);
  return state_.next_seq;
}

int ClusterStore::subscribe(Listener fn) {
  std::lock_guard lock(mu_);
  for (const auto& ev : events_) fn(ev);
  listeners_.emplace_back(next_listener_, std::move(fn));
  return next_listener_++;
}

void ClusterStore::unsubscribe(int id) {
  std::lock_guard lock(mu_);
  std::erase_if(listeners_, [id](const auto& entry) { return entry.first == id; });
}

bool ClusterStore::wait_for_seq(int64_t seq, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return state_.next_seq > seq; });
}

}  // namespace q8s
