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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "exposition_parser.hpp"
#include "q8s/error.hpp"
#include "q8s/manifest.hpp"
#include "test_util.hpp"

namespace q8s {
namespace {

using cli::Io;
using testkit::TempDir;
namespace xs = cli::exit_status;

struct Captured {
  std::ostringstream out, err;
  Io io() { return {out, err}; }
};

class CliTest : public ::testing::Test {
 protected:
  ControlPlaneOptions options(bool virtual_clock = true) {
    ControlPlaneOptions o;
    o.registry = registry.path();
    o.virtual_clock = virtual_clock;
    return o;
  }

  std::string write_file(const std::string& name, const std::string& text) {
    auto p = files.path() / name;
    std::ofstream(p) << text;
    return p.string();
  }

  TempDir registry, files;
};

TEST_F(CliTest, apply_get_and_logs_for_the_paper_job) {
  ControlPlane cp(options());
  cli::install_demo_topology(cp, {false, false, false});
  ApiHandler handler(cp);
  InProcessClient api(handler);
  Captured c;
  const auto node = write_file("node.yaml", cli::kPaperNodeManifest);
  const auto job = write_file("job.yaml", cli::kPaperJobManifest);
  ASSERT_EQ(cli::cmd_apply(api, {node, job}, c.io()), xs::kOk) << c.err.str();
  EXPECT_EQ(c.out.str(), "node/node-0 created\njob/quantum-job created\n");

  Captured again;
  EXPECT_EQ(cli::cmd_apply(api, {job}, again.io()), xs::kUserError);
  EXPECT_NE(again.err.str().find("DuplicateName"), std::string::npos);

  ASSERT_TRUE(cp.run_until_quiescent());
  Captured get;
  ASSERT_EQ(cli::cmd_get(api, "jobs", false, get.io()), xs::kOk);
  EXPECT_NE(get.out.str().find("quantum-job   COMPLETED   node-0"), std::string::npos) << get.out.str();
  EXPECT_EQ(get.out.str().rfind("NAME", 0), 0u);

  Captured logs;
  ASSERT_EQ(cli::cmd_logs(api, "jobs/quantum-job", false, logs.io()), xs::kOk);
  std::vector<std::string> lines;
  std::istringstream in(logs.out.str());
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_GE(lines.size(), 2u);
  auto doc = nlohmann::json::parse(lines.back());
  EXPECT_EQ(doc.at("backend"), "remote-qpu");
  for (const auto& [k, v] : doc.at("counts").items()) EXPECT_TRUE(k == "00" || k == "11");
  EXPECT_EQ(lines[lines.size() - 2].rfind("Total counts: ", 0), 0u);
}

TEST_F(CliTest, malformed_manifest_submits_nothing) {
  ControlPlane cp(options());
  ApiHandler handler(cp);
  InProcessClient api(handler);
  const auto good = write_file("node.yaml", cli::kPaperNodeManifest);
  const auto bad = write_file("bad.yaml", "apiVersion: v1\nkind: Node\nmetadata:\n  labels: [oops\n");
  Captured c;
  EXPECT_EQ(cli::cmd_apply(api, {good, bad}, c.io()), xs::kUserError);
  EXPECT_NE(c.err.str().find("bad.yaml:4:"), std::string::npos) << c.err.str();
  EXPECT_EQ(cp.store().next_seq(), 0);

  Captured missing;
  EXPECT_EQ(cli::cmd_apply(api, {(files.path() / "nope.yaml").string()}, missing.io()), xs::kUserError);
}

TEST_F(CliTest, get_pods_shows_qpu_serialization) {
  ControlPlane cp(options());
  cli::install_demo_topology(cp);
  cp.store().submit_job(cli::demo_job({cli::Scenario::Qpu}, "a"));
  cp.store().submit_job(cli::demo_job({cli::Scenario::Qpu}, "b"));
  cp.step();
  ApiHandler handler(cp);
  InProcessClient api(handler);
  Captured c;
  ASSERT_EQ(cli::cmd_get(api, "pods", false, c.io()), xs::kOk);
  EXPECT_NE(c.out.str().find("a-0    RUNNING   helmi-proxy"), std::string::npos) << c.out.str();
  EXPECT_NE(c.out.str().find("b-0    PENDING   <none>"), std::string::npos) << c.out.str();

  Captured pending;
  EXPECT_EQ(cli::cmd_logs(api, "b-0", false, pending.io()), xs::kOk);
  EXPECT_EQ(pending.out.str(), "");
  Captured unknown;
  EXPECT_EQ(cli::cmd_logs(api, "jobs/nope", false, unknown.io()), xs::kUserError);
  EXPECT_NE(unknown.err.str().find("UnknownTarget"), std::string::npos);
  Captured kind;
  EXPECT_EQ(cli::cmd_get(api, "widgets", false, kind.io()), xs::kUserError);

  Captured top;
  ASSERT_EQ(cli::cmd_top_nodes(api, top.io()), xs::kOk);
  EXPECT_NE(top.out.str().find("helmi-proxy   vendor.example.com/qpu   1          0             1"), std::string::npos)
      << top.out.str();
}

// Whatever the CLI prints in yaml mode parses back into exactly what the
// store holds at that moment.
TEST_F(CliTest, yaml_output_agrees_with_store) {
  ControlPlane cp(options());
  cli::install_demo_topology(cp);
  cp.store().submit_job(cli::demo_job({cli::Scenario::Cpu, 16, 1}, "c"));
  cp.store().submit_job(cli::demo_job({cli::Scenario::Qpu, 16, 2}, "q"));
  cp.step();
  ApiHandler handler(cp);
  InProcessClient api(handler);
  for (const char* kind : {"nodes", "jobs", "pods"}) {
    Captured c;
    ASSERT_EQ(cli::cmd_get(api, kind, true, c.io()), xs::kOk);
    const auto objects = parse_manifest(c.out.str());
    const ClusterState state = cp.store().snapshot();
    size_t expected = std::string(kind) == "nodes" ? state.nodes.size()
                      : std::string(kind) == "jobs" ? state.jobs.size()
                                                    : state.pods.size();
    ASSERT_EQ(objects.size(), expected) << kind;
    for (const auto& obj : objects) {
      if (auto* n = std::get_if<NodeSpec>(&obj)) EXPECT_EQ(*n, state.nodes.at(n->meta.name));
      if (auto* j = std::get_if<JobSpec>(&obj)) EXPECT_EQ(*j, state.jobs.at(j->meta.name));
      if (auto* p = std::get_if<PodSpec>(&obj)) EXPECT_EQ(*p, state.pods.at(p->meta.name));
    }
  }
}

TEST_F(CliTest, delete_paths) {
  ControlPlane cp(options());
  cli::install_demo_topology(cp);
  cp.store().submit_job(cli::demo_job({cli::Scenario::Qpu}, "q"));
  cp.step();
  ApiHandler handler(cp);
  InProcessClient api(handler);
  Captured busy;
  EXPECT_EQ(cli::cmd_delete(api, "node/helmi-proxy", busy.io()), xs::kUserError);
  EXPECT_NE(busy.err.str().find("InvariantViolation"), std::string::npos);
  Captured job;
  EXPECT_EQ(cli::cmd_delete(api, "jobs/q", job.io()), xs::kOk);
  EXPECT_EQ(job.out.str(), "job/q deleted\n");
  Captured node;
  EXPECT_EQ(cli::cmd_delete(api, "node/helmi-proxy", node.io()), xs::kOk);
  Captured missing, malformed;
  EXPECT_EQ(cli::cmd_delete(api, "pod/ghost", missing.io()), xs::kUserError);
  EXPECT_EQ(cli::cmd_delete(api, "ghost", malformed.io()), xs::kUserError);
}

TEST_F(CliTest, demo_scenarios) {
  ControlPlane cp(options(false));
  cli::install_demo_topology(cp);
  cp.start();
  ApiHandler handler(cp);
  InProcessClient api(handler);

  Captured one;
  ASSERT_EQ(cli::cmd_demo(api, {cli::Scenario::Cpu, 1, 5}, one.io()), xs::kOk) << one.err.str();
  std::istringstream lines(one.out.str());
  std::string first, second, counts;
  std::getline(lines, first);
  std::getline(lines, second);
  std::getline(lines, counts);
  EXPECT_EQ(first, "job/demo-cpu created");
  EXPECT_EQ(second, "job/demo-cpu completed on node cpu-node (pod demo-cpu-0)");
  auto doc = nlohmann::json::parse(counts);
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc.begin().value(), 1);

  Captured qpu;
  ASSERT_EQ(cli::cmd_demo(api, {cli::Scenario::Qpu, 4096, 7}, qpu.io()), xs::kOk) << qpu.err.str();
  EXPECT_NE(qpu.out.str().find("job/quantum-job completed on node helmi-proxy"), std::string::npos);

  Captured again;
  ASSERT_EQ(cli::cmd_demo(api, {cli::Scenario::Cpu, 8, 5}, again.io()), xs::kOk);
  EXPECT_EQ(again.out.str().rfind("job/demo-cpu-2 created", 0), 0u);
  cp.stop();
}

TEST_F(CliTest, demo_times_out_without_a_gpu_node) {
  ControlPlane cp(options());
  cli::install_demo_topology(cp, {true, false, true});
  cp.start();
  ApiHandler handler(cp);
  InProcessClient api(handler);
  Captured c;
  cli::DemoOptions opts{cli::Scenario::Gpu, 64, 1, std::chrono::milliseconds(200)};
  EXPECT_EQ(cli::cmd_demo(api, opts, c.io()), xs::kJobFailed);
  EXPECT_NE(c.err.str().find("timed out"), std::string::npos);
  cp.stop();
}

TEST_F(CliTest, demo_reports_failed_job) {
  auto o = options();
  o.default_remote->failure_prob = 1.0;
  ControlPlane cp(o);
  cli::install_demo_topology(cp);
  cp.start();
  ApiHandler handler(cp);
  InProcessClient api(handler);
  Captured c;
  EXPECT_EQ(cli::cmd_demo(api, {cli::Scenario::Qpu, 64, 1}, c.io()), xs::kJobFailed);
  EXPECT_NE(c.err.str().find("Failed"), std::string::npos) << c.err.str();
  cp.stop();
}

TEST_F(CliTest, follow_streams_until_terminal) {
  auto o = options(false);
  o.default_remote->submit_latency_ms = 150;
  ControlPlane cp(o);
  cli::install_demo_topology(cp);
  cp.store().submit_job(cli::demo_job({cli::Scenario::Qpu, 32, 3}, "slow"));
  cp.start();
  ApiHandler handler(cp);
  InProcessClient api(handler);
  Captured c;
  while (cp.store().snapshot().pods.at("slow-0").status->phase == PodPhase::Pending) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  ASSERT_EQ(cli::cmd_logs(api, "jobs/slow", true, c.io(), std::chrono::milliseconds(5)), xs::kOk);
  EXPECT_TRUE(is_terminal(cp.store().snapshot().pods.at("slow-0").status->phase));
  const std::string out = c.out.str();
  EXPECT_EQ(out.rfind("started on node helmi-proxy", 0), 0u);
  EXPECT_NE(out.find("\"counts\""), std::string::npos) << out;
  cp.stop();
}

TEST_F(CliTest, unreachable_server_is_exit_two) {
  HttpClient api("127.0.0.1:1");
  Captured c;
  EXPECT_EQ(cli::cmd_get(api, "nodes", false, c.io()), xs::kServerError);
  EXPECT_NE(c.err.str().find("ServerUnreachable"), std::string::npos);
}

TEST_F(CliTest, command_line_parsing) {
  auto run = [](std::vector<std::string> args, Captured& c) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data(), c.io());
  };
  Captured help, none, bad_demo, bad_output;
  EXPECT_EQ(run({"q8s", "--help"}, help), xs::kOk);
  EXPECT_NE(help.out.str().find("demo"), std::string::npos);
  EXPECT_EQ(run({"q8s"}, none), xs::kUserError);
  EXPECT_EQ(run({"q8s", "demo", "tpu"}, bad_demo), xs::kUserError);
  EXPECT_EQ(run({"q8s", "get", "pods", "-o", "json"}, bad_output), xs::kUserError);
  Captured unreachable;
  EXPECT_EQ(run({"q8s", "--server", "127.0.0.1:1", "get", "pods"}, unreachable), xs::kServerError);
}

class HttpApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ControlPlaneOptions o;
    o.registry = registry.path();
    o.state_dir = state.path();
    cp = std::make_unique<ControlPlane>(o);
    handler = std::make_unique<ApiHandler>(*cp);
    server = std::make_unique<ApiServer>(*handler);
    server->start("127.0.0.1:0");
    cp->start();
    client = std::make_unique<HttpClient>(server->address());
  }
  void TearDown() override {
    server->stop();
    cp->stop();
  }
  TempDir registry, state;
  std::unique_ptr<ControlPlane> cp;
  std::unique_ptr<ApiHandler> handler;
  std::unique_ptr<ApiServer> server;
  std::unique_ptr<HttpClient> client;
};

TEST_F(HttpApiTest, routes) {
  auto nodes = client->request("GET", "/api/nodes", "");
  EXPECT_EQ(nodes.status, 200);
  EXPECT_EQ(nodes.body, "[]");
  EXPECT_TRUE(nodes.headers.count("X-Cluster-Time"));

  EXPECT_EQ(client->request("GET", "/healthz", "").status, 200);
  auto metrics = client->request("GET", "/metrics", "");
  EXPECT_EQ(metrics.content_type, "text/plain; version=0.0.4");
  EXPECT_NO_THROW(testkit::parse_exposition(metrics.body));

  cli::install_demo_topology(*cp);
  const std::string job = to_json(cli::demo_job({cli::Scenario::Cpu, 10, 1}, "h")).dump();
  EXPECT_EQ(client->request("POST", "/api/apply", job).status, 201);
  EXPECT_EQ(client->request("POST", "/api/apply", job).status, 409);
  EXPECT_EQ(client->request("POST", "/api/apply", "{not json").status, 400);
  EXPECT_EQ(client->request("POST", "/api/apply", R"({"apiVersion":"v1","kind":"Gadget"})").status, 400);
  EXPECT_EQ(cp->wait_for_job("h", std::chrono::seconds(5)), JobPhase::Completed);

  auto all = nlohmann::json::parse(client->request("GET", "/api/pods/h-0/logs", "").body);
  ASSERT_GE(all.size(), 2u);
  const int64_t first_seq = all[0]["seq"];
  auto rest = nlohmann::json::parse(client->request("GET", "/api/pods/h-0/logs?since=" + std::to_string(first_seq), "").body);
  EXPECT_EQ(rest.size(), all.size() - 1);
  EXPECT_EQ(client->request("GET", "/api/pods/ghost/logs", "").status, 404);
  EXPECT_EQ(client->request("GET", "/api/pods/h-0/logs?since=x", "").status, 400);
  EXPECT_EQ(client->request("GET", "/api/widgets", "").status, 400);
  EXPECT_EQ(client->request("GET", "/nowhere", "").status, 404);

  EXPECT_EQ(client->request("DELETE", "/api/pods/ghost", "").status, 404);
  EXPECT_EQ(client->request("DELETE", "/api/nodes/cpu-node", "").status, 200);
  auto jobs = nlohmann::json::parse(client->request("GET", "/api/jobs", "").body);
  ASSERT_EQ(jobs.size(), 1u);
  EXPECT_EQ(jobs[0]["status"]["phase"], "Completed");
}

TEST_F(HttpApiTest, restart_keeps_completed_jobs) {
  cli::install_demo_topology(*cp);
  Captured c;
  ASSERT_EQ(cli::cmd_demo(*client, {cli::Scenario::Qpu, 64, 1}, c.io()), xs::kOk) << c.err.str();
  const std::string before = client->request("GET", "/api/jobs", "").body;
  TearDown();
  client.reset();
  server.reset();
  handler.reset();
  cp.reset();
  SetUp();
  EXPECT_EQ(client->request("GET", "/api/jobs", "").body, before);
  EXPECT_NE(before.find("\"Completed\""), std::string::npos);
}

TEST(Serve, corrupt_history_names_the_seq) {
  TempDir state;
  {
    VirtualClock clock;
    ClusterStore store(clock, state.path());
    store.register_node(testkit::listing_node("a"));
    store.register_node(testkit::listing_node("b"));
  }
  std::ofstream(state.path() / "events.ndjson", std::ios::app) << "{\"seq\":2,\"ts\":0,\"kind\":\"Bogus\"}\n";
  ControlPlaneOptions o;
  o.state_dir = state.path();
  try {
    ControlPlane cp(o);
    FAIL() << "expected CorruptHistory";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "CorruptHistory");
    EXPECT_NE(std::string(e.what()).find("seq 2"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace q8s
