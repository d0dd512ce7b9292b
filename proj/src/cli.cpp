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

#include "q8s/cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "CLI11.hpp"
#include "q8s/bundle.hpp"
#include "q8s/error.hpp"
#include "q8s/manifest.hpp"

namespace q8s::cli {

using nlohmann::ordered_json;

const char* const kPaperNodeManifest = R"(apiVersion: v1
kind: Node
metadata:
  labels:
    accelerator: qpu
status:
  capacity:
    vendor.example.com/qpu: 1
)";

const char* const kPaperJobManifest = R"(apiVersion: batch/v1
kind: Job
metadata:
  name: quantum-job
spec:
  template:
    spec:
      nodeSelector:
        accelerator: qpu
      containers:
      - name: quantum-task
        image: registry.example.com/program:v1.2.3
        command: ["./extrypoint.sh"]
        resources:
          requests:
            vendor.example.com/qpu: 1
          limits:
            vendor.example.com/qpu: 1
)";

const char* const kPaperPodManifest = R"(apiVersion: v1
kind: Pod
metadata:
  name: quantum-pod
spec:
  nodeSelector:
    accelerator: qpu
  containers:
    - name: quantum-task
      image: "registry.example.com/program:v1.2.3"
      resources:
        requests:
          vendor.example.com/qpu: 1
        limits:
          vendor.example.com/qpu: 1
)";

namespace {

constexpr const char* kQpuNodeName = "helmi-proxy";
constexpr const char* kCpuNodeName = "cpu-node";
constexpr const char* kGpuNodeName = "gpu-node";

/// Thrown inside commands; carries the exit status to return.
struct Failure {
  int status;
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

ApiResponse call(ApiClient& api, Io io, const std::string& method, const std::string& target,
                 const std::string& body = "") {
  try {
    return api.request(method, target, body);
  } catch (const Error& e) {
    io.err << "error: " << e.code() << ": " << e.what() << "\n";
    throw Failure{exit_status::kServerError};
  }
}

/// Prints an error response and fails with the matching exit status.
[[noreturn]] void fail_response(const ApiResponse& resp, Io io, const std::string& what) {
  std::string code = "HTTP" + std::to_string(resp.status), message = resp.body;
  try {
    auto j = ordered_json::parse(resp.body);
    code = j.value("error", code);
    message = j.value("message", message);
  } catch (const std::exception&) {
  }
  io.err << "error: " << what << ": " << code << ": " << message << "\n";
  throw Failure{resp.status >= 500 ? exit_status::kServerError : exit_status::kUserError};
}

ordered_json get_json(ApiClient& api, Io io, const std::string& target, const std::string& what) {
  ApiResponse resp = call(api, io, "GET", target);
  if (resp.status != 200) fail_response(resp, io, what);
  try {
    return ordered_json::parse(resp.body);
  } catch (const std::exception& e) {
    io.err << "error: malformed server response: " << e.what() << "\n";
    throw Failure{exit_status::kServerError};
  }
}

template <typename F>
int guarded(Io io, F&& body) {
  try {
    return body();
  } catch (const Failure& f) {
    return f.status;
  } catch (const Error& e) {
    io.err << "error: " << e.code() << ": " << e.what() << "\n";
    return exit_status::kUserError;
  }
}

std::string format_age(Instant now, const ordered_json& meta) {
  if (!meta.contains("creationTimestamp")) return "<unknown>";
  auto created = parse_timestamp(meta["creationTimestamp"].get<std::string>());
  if (!created) return "<unknown>";
  Instant s = std::max<Instant>(0, now - *created) / 1000;
  if (s < 60) return std::to_string(s) + "s";
  if (s < 3600) return std::to_string(s / 60) + "m";
  if (s < 86400) return std::to_string(s / 3600) + "h";
  return std::to_string(s / 86400) + "d";
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 3, ' ');
    }
    out << line << "\n";
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `jobs/x` resolves through the job; `pods/x` and bare `x` name a pod.
std::string resolve_pod(ApiClient& api, Io io, const std::string& target) {
  auto slash = target.find('/');
  if (slash == std::string::npos) return target;
  const std::string kind = lower(target.substr(0, slash)), name = target.substr(slash + 1);
  if (kind == "pod" || kind == "pods") return name;
  if (kind != "job" && kind != "jobs") {
    io.err << "error: UnknownTarget: " << target << " is not a pod or jobs/<name>\n";
    throw Failure{exit_status::kUserError};
  }
  ApiResponse resp = call(api, io, "GET", "/api/jobs/" + name);
  if (resp.status == 404) {
    io.err << "error: UnknownTarget: job " << name << " not found\n";
    throw Failure{exit_status::kUserError};
  }
  if (resp.status != 200) fail_response(resp, io, "logs " + target);
  auto job = ordered_json::parse(resp.body);
  std::string pod = job.contains("status") ? job["status"].value("activePod", "") : "";
  if (pod.empty()) {
    io.err << "error: UnknownTarget: job " << name << " has no pods\n";
    throw Failure{exit_status::kUserError};
  }
  return pod;
}

std::string pod_phase(ApiClient& api, Io io, const std::string& pod) {
  auto j = get_json(api, io, "/api/pods/" + pod, "pod " + pod);
  return j.contains("status") ? j["status"].value("phase", "Pending") : "Pending";
}

std::string counts_of_result(const std::string& line) {
  auto doc = ordered_json::parse(line);
  return doc.at("counts").dump();
}

}  // namespace

int cmd_apply(ApiClient& api, const std::vector<std::string>& files, Io io) {
  return guarded(io, [&] {
    std::vector<ClusterObject> objects;
    for (const auto& file : files) {
      try {
        for (auto& obj : parse_manifest(read_file(file))) objects.push_back(std::move(obj));
      } catch (const PositionedError& e) {
        io.err << "error: " << file << ":" << e.position().line << ":" << e.position().column << ": " << e.code()
               << ": " << e.detail() << "\n";
        return exit_status::kUserError;
      }
    }
    for (const auto& obj : objects) {
      ApiResponse resp = call(api, io, "POST", "/api/apply", to_json(obj).dump());
      const std::string kind = lower(std::string(kind_of(obj)));
      if (resp.status != 201) fail_response(resp, io, "apply " + kind + "/" + meta_of(obj).name);
      io.out << kind << "/" << ordered_json::parse(resp.body).at("name").get<std::string>() << " created\n";
    }
    return exit_status::kOk;
  });
}

int cmd_get(ApiClient& api, const std::string& kind_text, bool yaml, Io io) {
  return guarded(io, [&] {
    const std::string kind = lower(kind_text);
    std::string plural = kind.empty() || kind.back() == 's' ? kind : kind + "s";
    if (plural != "nodes" && plural != "pods" && plural != "jobs") {
      io.err << "error: UnknownKind: " << kind_text << " (expected nodes, pods or jobs)\n";
      return exit_status::kUserError;
    }
    ApiResponse resp = call(api, io, "GET", "/api/" + plural);
    if (resp.status != 200) fail_response(resp, io, "get " + plural);
    const auto items = ordered_json::parse(resp.body);
    if (yaml) {
      bool first = true;
      for (const auto& item : items) {
        if (!first) io.out << "---\n";
        first = false;
        io.out << serialize_manifest(decode_object(item));
      }
      return exit_status::kOk;
    }
    Instant now = 0;
    if (auto it = resp.headers.find("X-Cluster-Time"); it != resp.headers.end()) now = std::stoll(it->second);
    std::map<std::string, std::string> pod_node;
    if (plural == "jobs") {
      for (const auto& pod : get_json(api, io, "/api/pods", "get pods")) {
        if (pod.contains("status")) pod_node[pod["metadata"]["name"]] = pod["status"].value("nodeName", "");
      }
    }
    std::vector<std::vector<std::string>> rows = {{"NAME", "STATUS", "NODE", "AGE"}};
    for (const auto& item : items) {
      const auto& meta = item["metadata"];
      std::string status = "Ready", node = "-";
      if (plural != "nodes") {
        const auto st = item.value("status", ordered_json::object());
        status = st.value("phase", plural == "jobs" ? "Active" : "Pending");
        node = plural == "pods" ? st.value("nodeName", "") : pod_node[st.value("activePod", "")];
        if (node.empty()) node = "<none>";
      }
      rows.push_back({meta.value("name", ""), upper(status), node, format_age(now, meta)});
    }
    print_table(io.out, rows);
    return exit_status::kOk;
  });
}

int cmd_logs(ApiClient& api, const std::string& target, bool follow, Io io, std::chrono::milliseconds poll) {
  return guarded(io, [&] {
    const std::string pod = resolve_pod(api, io, target);
    int64_t since = -1;
    for (;;) {
      ApiResponse resp = call(api, io, "GET", "/api/pods/" + pod + "/logs?since=" + std::to_string(since));
      if (resp.status == 404) {
        io.err << "error: UnknownTarget: pod " << pod << " not found\n";
        return exit_status::kUserError;
      }
      if (resp.status != 200) fail_response(resp, io, "logs " + target);
      const auto lines = ordered_json::parse(resp.body);
      for (const auto& rec : lines) {
        io.out << rec.at("line").get<std::string>() << "\n";
        since = rec.at("seq").get<int64_t>();
      }
      io.out.flush();
      if (!follow) return exit_status::kOk;
      if (lines.empty()) {
        const std::string phase = pod_phase(api, io, pod);
        if (phase == "Succeeded" || phase == "Failed") {
          // Lines appended just before the transition were fetched already
          // unless they landed between the two requests; drain once more.
          auto rest = get_json(api, io, "/api/pods/" + pod + "/logs?since=" + std::to_string(since), "logs");
          for (const auto& rec : rest) io.out << rec.at("line").get<std::string>() << "\n";
          return exit_status::kOk;
        }
        std::this_thread::sleep_for(poll);
      }
    }
  });
}

int cmd_delete(ApiClient& api, const std::string& target, Io io) {
  return guarded(io, [&] {
    auto slash = target.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == target.size()) {
      io.err << "error: expected <kind>/<name>, got " << target << "\n";
      return exit_status::kUserError;
    }
    ApiResponse resp =
        call(api, io, "DELETE", "/api/" + target.substr(0, slash) + "/" + target.substr(slash + 1));
    if (resp.status != 200) fail_response(resp, io, "delete " + target);
    auto body = ordered_json::parse(resp.body);
    io.out << lower(body.at("kind").get<std::string>()) << "/" << body.at("name").get<std::string>() << " deleted\n";
    return exit_status::kOk;
  });
}

int cmd_top_nodes(ApiClient& api, Io io) {
  return guarded(io, [&] {
    const auto nodes = get_json(api, io, "/api/nodes", "top nodes");
    const auto pods = get_json(api, io, "/api/pods", "top nodes");
    std::vector<std::vector<std::string>> rows = {{"NAME", "RESOURCE", "CAPACITY", "ALLOCATABLE", "RUNNING"}};
    for (const auto& node : nodes) {
      const std::string name = node["metadata"]["name"];
      std::map<std::string, int64_t> used;
      int running = 0;
      for (const auto& pod : pods) {
        const auto st = pod.value("status", ordered_json::object());
        if (st.value("nodeName", "") != name) continue;
        const std::string phase = st.value("phase", "Pending");
        if (phase == "Succeeded" || phase == "Failed") continue;
        if (phase == "Running") ++running;
        const auto& containers = pod["spec"]["containers"];
        if (containers.empty() || !containers[0].contains("resources")) continue;
        const auto& res = containers[0]["resources"];
        if (res.contains("requests")) {
          for (const auto& [k, v] : res["requests"].items()) used[k] += v.get<int64_t>();
        }
      }
      const auto cap = node.contains("status") ? node["status"].value("capacity", ordered_json::object())
                                               : ordered_json::object();
      if (cap.empty()) rows.push_back({name, "-", "-", "-", std::to_string(running)});
      for (const auto& [k, v] : cap.items()) {
        const int64_t c = v.get<int64_t>();
        rows.push_back({name, k, std::to_string(c), std::to_string(c - used[k]), std::to_string(running)});
      }
    }
    print_table(io.out, rows);
    return exit_status::kOk;
  });
}

std::optional<Scenario> parse_scenario(const std::string& text) {
  if (text == "cpu") return Scenario::Cpu;
  if (text == "gpu") return Scenario::Gpu;
  if (text == "qpu") return Scenario::Qpu;
  return std::nullopt;
}

JobSpec demo_job(const DemoOptions& opts, const std::string& name) {
  JobSpec job = std::get<JobSpec>(parse_manifest(kPaperJobManifest).at(0));
  job.meta.name = name;
  auto& tmpl = job.pod_template;
  if (opts.scenario == Scenario::Cpu) {
    tmpl.node_selector = {{"accelerator", "cpu"}};
    tmpl.resources = {};
  } else if (opts.scenario == Scenario::Gpu) {
    tmpl.node_selector = {{"accelerator", "gpu"}};
    tmpl.resources.requests = {{"nvidia.com/gpu", 1}};
    tmpl.resources.limits = {{"nvidia.com/gpu", 1}};
  }
  tmpl.task.args = {"--shots", std::to_string(opts.shots)};
  if (opts.seed) {
    tmpl.task.args.push_back("--seed");
    tmpl.task.args.push_back(std::to_string(*opts.seed));
  }
  return job;
}

int cmd_demo(ApiClient& api, const DemoOptions& opts, Io io, std::chrono::milliseconds poll) {
  return guarded(io, [&] {
    const std::string base = opts.scenario == Scenario::Qpu   ? "quantum-job"
                             : opts.scenario == Scenario::Gpu ? "demo-gpu"
                                                              : "demo-cpu";
    std::string name;
    for (int n = 1;; ++n) {
      name = n == 1 ? base : base + "-" + std::to_string(n);
      ApiResponse resp = call(api, io, "POST", "/api/apply", to_json(demo_job(opts, name)).dump());
      if (resp.status == 201) break;
      if (resp.status != 409 || n >= 1000) fail_response(resp, io, "demo job " + name);
    }
    io.out << "job/" << name << " created\n";
    io.out.flush();

    const auto deadline = std::chrono::steady_clock::now() + opts.timeout;
    ordered_json status;
    for (;;) {
      status = get_json(api, io, "/api/jobs/" + name, "job " + name).value("status", ordered_json::object());
      if (status.value("phase", "Active") != "Active") break;
      if (std::chrono::steady_clock::now() >= deadline) {
        io.err << "error: timed out after " << opts.timeout.count() << " ms waiting for job/" << name
               << " (still Active)\n";
        return exit_status::kJobFailed;
      }
      std::this_thread::sleep_for(poll);
    }
    const std::string phase = status.value("phase", "");
    const std::string pod = status.value("activePod", "");
    if (phase != "Completed") {
      io.err << "error: job/" << name << " " << phase << " after " << status.value("attempts", 0)
             << " failed attempts; see `logs jobs/" << name << "`\n";
      return exit_status::kJobFailed;
    }
    const auto pod_json = get_json(api, io, "/api/pods/" + pod, "pod " + pod);
    const auto logs = get_json(api, io, "/api/pods/" + pod + "/logs", "logs " + pod);
    io.out << "job/" << name << " completed on node " << pod_json["status"].value("nodeName", "") << " (pod " << pod
           << ")\n";
    if (!logs.empty()) io.out << counts_of_result(logs.back().at("line").get<std::string>()) << "\n";
    return exit_status::kOk;
  });
}

void install_demo_topology(ControlPlane& cp, DemoTopology topology) {
  const ImageRef image{"program", "v1.2.3"};
  const auto registry = cp.options().registry;
  if (!std::filesystem::exists(registry / image.name / image.tag / "task.yaml")) {
    write_bundle(registry, image, kBellQasm, kDefaultShots, std::nullopt, "bell.qasm");
  }
  const ClusterState state = cp.store().snapshot();
  auto add = [&](NodeSpec node) {
    if (!state.nodes.count(node.meta.name)) cp.store().register_node(std::move(node));
  };
  if (topology.cpu) {
    NodeSpec cpu;
    cpu.meta.name = kCpuNodeName;
    cpu.meta.labels = {{"accelerator", "cpu"}};
    add(cpu);
  }
  if (topology.gpu) {
    NodeSpec gpu;
    gpu.meta.name = kGpuNodeName;
    gpu.meta.labels = {{"accelerator", "gpu"}};
    gpu.capacity = {{"nvidia.com/gpu", 1}};
    add(gpu);
  }
  if (topology.qpu) {
    NodeSpec qpu = std::get<NodeSpec>(parse_manifest(kPaperNodeManifest).at(0));
    qpu.meta.name = kQpuNodeName;
    qpu.meta.needs_name = false;
    add(qpu);
  }
  cp.nudge();
}

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

ControlPlaneOptions plane_options(const std::string& state_dir, const std::string& registry, const std::string& clock,
                                  uint64_t seed) {
  ControlPlaneOptions o;
  o.state_dir = state_dir;
  o.registry = registry;
  o.virtual_clock = clock == "virtual";
  o.seed = seed;
  return o;
}

constexpr const char* kDefaultListen = "127.0.0.1:6443";

int serve(const std::string& state_dir, std::string listen, const std::string& clock, std::string registry,
          bool demo, uint64_t seed, Io io) {
  if (clock != "wall" && clock != "virtual") {
    io.err << "error: clock must be wall or virtual\n";
    return exit_status::kUserError;
  }
  if (registry.empty()) registry = (std::filesystem::path(state_dir) / "registry").string();
  try {
    std::filesystem::create_directories(state_dir);
    ControlPlane cp(plane_options(state_dir, registry, clock, seed));
    if (demo) install_demo_topology(cp);
    ApiHandler handler(cp);
    ApiServer server(handler);
    try {
      server.start(listen);
    } catch (const Error&) {
      if (listen != kDefaultListen) throw;
      server.start("127.0.0.1:0");
    }
    cp.start();
    io.out << "q8s control plane listening on http://" << server.address() << " (state " << state_dir << ", "
           << clock << " clock)\n";
    io.out.flush();
    g_stop = false;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    cp.stop();
    io.out << "shut down\n";
    return exit_status::kOk;
  } catch (const Error& e) {
    io.err << "error: " << e.code() << ": " << e.what() << "\n";
    return exit_status::kServerError;
  }
}

/// Talks to the server when one answers, otherwise runs the demo against a
/// private in-process control plane.
int demo(const std::string& server, const DemoOptions& opts, Io io) {
  HttpClient http(server);
  bool reachable = false;
  try {
    reachable = http.request("GET", "/healthz", "").status == 200;
  } catch (const Error&) {
  }
  if (reachable) return cmd_demo(http, opts, io);

  const std::string clock = env_or("Q8S_CLOCK", "wall");
  std::filesystem::path scratch;
  std::string registry = env_or("Q8S_REGISTRY_DIR", "");
  if (registry.empty()) {
    scratch = std::filesystem::temp_directory_path() / ("q8s-demo-" + std::to_string(::getpid()));
    registry = (scratch / "registry").string();
  }
  io.err << "no server at " << server << "; using an in-process control plane\n";
  int rc;
  {
    ControlPlane cp(plane_options(env_or("Q8S_STATE_DIR", ""), registry, clock, std::random_device{}()));
    install_demo_topology(cp);
    cp.start();
    ApiHandler handler(cp);
    InProcessClient local(handler);
    rc = cmd_demo(local, opts, io);
    cp.stop();
  }
  if (!scratch.empty()) {
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
  }
  return rc;
}

}  // namespace

int run(int argc, char** argv, Io io) {
  CLI::App app{"q8s: a miniature orchestrator for hybrid quantum-classical jobs"};
  app.require_subcommand(1);
  std::string server = env_or("Q8S_LISTEN", kDefaultListen);
  app.add_option("--server", server, "Control plane address host:port (env Q8S_LISTEN)");

  auto* serve_cmd = app.add_subcommand("serve", "Run the control plane and HTTP API");
  std::string state_dir = env_or("Q8S_STATE_DIR", "q8s-state");
  std::string listen = env_or("Q8S_LISTEN", kDefaultListen);
  std::string clock = env_or("Q8S_CLOCK", "wall");
  std::string registry = env_or("Q8S_REGISTRY_DIR", "");
  bool demo_topology = false;
  uint64_t seed = 0x51c0ffee;
  serve_cmd->add_option("--state-dir", state_dir, "Event log directory (env Q8S_STATE_DIR)");
  serve_cmd->add_option("--listen", listen, "Listen address host:port (env Q8S_LISTEN)");
  serve_cmd->add_option("--clock", clock, "wall or virtual (env Q8S_CLOCK)");
  serve_cmd->add_option("--registry", registry, "Task bundle registry (env Q8S_REGISTRY_DIR)");
  serve_cmd->add_flag("--demo-topology", demo_topology, "Register the cpu, gpu and qpu demo nodes");
  serve_cmd->add_option("--seed", seed, "Seed for per-run task seeds");

  auto* apply_cmd = app.add_subcommand("apply", "Create objects from manifest files");
  std::vector<std::string> files;
  apply_cmd->add_option("-f,--filename", files, "Manifest file")->required();

  auto* get_cmd = app.add_subcommand("get", "List nodes, pods or jobs");
  std::string kind, output = "table";
  get_cmd->add_option("kind", kind, "nodes, pods or jobs")->required();
  get_cmd->add_option("-o,--output", output, "table or yaml")->check(CLI::IsMember({"table", "yaml"}));

  auto* logs_cmd = app.add_subcommand("logs", "Print a pod's log");
  std::string target;
  bool follow = false;
  logs_cmd->add_option("target", target, "pod name or jobs/<name>")->required();
  logs_cmd->add_flag("-f,--follow", follow, "Stream until the pod finishes");

  auto* delete_cmd = app.add_subcommand("delete", "Delete an object");
  std::string delete_target;
  delete_cmd->add_option("target", delete_target, "<kind>/<name>")->required();

  auto* top_cmd = app.add_subcommand("top", "Show resource usage");
  std::string top_what;
  top_cmd->add_option("what", top_what, "nodes")->required()->check(CLI::IsMember({"nodes"}));

  auto* demo_cmd = app.add_subcommand("demo", "Run the Bell-state demonstration");
  std::string scenario;
  int64_t shots = 1024;
  std::optional<uint64_t> demo_seed;
  double timeout_s = 60;
  demo_cmd->add_option("scenario", scenario, "cpu, gpu or qpu")->required()->check(CLI::IsMember({"cpu", "gpu", "qpu"}));
  demo_cmd->add_option("--shots", shots, "Shots")->check(CLI::PositiveNumber);
  demo_cmd->add_option("--seed", demo_seed, "Sampling seed");
  demo_cmd->add_option("--timeout", timeout_s, "Seconds to wait for the job")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, io.out, io.err) == 0 ? exit_status::kOk : exit_status::kUserError;
  }

  if (*serve_cmd) return serve(state_dir, listen, clock, registry, demo_topology, seed, io);
  if (*demo_cmd) {
    DemoOptions opts{*parse_scenario(scenario), shots, demo_seed,
                     std::chrono::milliseconds(static_cast<int64_t>(timeout_s * 1000))};
    return demo(server, opts, io);
  }
  std::unique_ptr<HttpClient> http;
  try {
    http = std::make_unique<HttpClient>(server);
  } catch (const Error& e) {
    io.err << "error: " << e.code() << ": " << e.what() << "\n";
    return exit_status::kUserError;
  }
  if (*apply_cmd) return cmd_apply(*http, files, io);
  if (*get_cmd) return cmd_get(*http, kind, output == "yaml", io);
  if (*logs_cmd) return cmd_logs(*http, target, follow, io);
  if (*delete_cmd) return cmd_delete(*http, delete_target, io);
  return cmd_top_nodes(*http, io);
}

}  // namespace q8s::cli
