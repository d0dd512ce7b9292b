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

#include "q8s/api.hpp"

#include <thread>

#include "httplib.h"
#include "q8s/error.hpp"
#include "q8s/manifest.hpp"
#include "q8s/remote.hpp"

namespace q8s {

using nlohmann::ordered_json;

namespace {

ApiResponse json_response(int status, const ordered_json& body) { return {status, body.dump(), "application/json", {}}; }

ApiResponse error_response(const Error& e) {
  ordered_json body = {{"error", e.code()}, {"message", e.what()}};
  if (const auto* pe = dynamic_cast<const PositionedError*>(&e)) {
    body["line"] = pe->position().line;
    body["column"] = pe->position().column;
  }
  return json_response(status_for(e.code()), body);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  size_t i = 0;
  while (i < path.size()) {
    size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) parts.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

/// nodes/node/Node -> Node; empty when unknown.
std::string canonical_kind(std::string k) {
  for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!k.empty() && k.back() == 's') k.pop_back();
  if (k == "node") return "Node";
  if (k == "job") return "Job";
  if (k == "pod") return "Pod";
  return "";
}

}  // namespace

ApiRequest ApiRequest::from_target(std::string method, std::string_view target, std::string body) {
  ApiRequest r;
  r.method = std::move(method);
  r.body = std::move(body);
  size_t q = target.find('?');
  r.path = std::string(target.substr(0, q));
  if (q != std::string_view::npos) {
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
      size_t amp = rest.find('&');
      std::string_view kv = rest.substr(0, amp);
      size_t eq = kv.find('=');
      r.query[std::string(kv.substr(0, eq))] = eq == std::string_view::npos ? "" : std::string(kv.substr(eq + 1));
      if (amp == std::string_view::npos) break;
      rest = rest.substr(amp + 1);
    }
  }
  return r;
}

int status_for(const std::string& code) {
  if (code == "UnknownNode" || code == "UnknownPod" || code == "UnknownJob" || code == "NotFound") return 404;
  if (code == "DuplicateName" || code == "InvariantViolation" || code == "AlreadyBound" ||
      code == "IllegalTransition") {
    return 409;
  }
  if (code == "SyntaxError" || code == "UnknownKind" || code == "UnknownField" || code == "BadRequest" ||
      code == "SelectorMismatch" || code == "InsufficientCapacity") {
    return 400;
  }
  return 500;
}

ApiResponse ApiHandler::handle(const ApiRequest& req) const {
  ApiResponse resp;
  try {
    resp = dispatch(req);
  } catch (const Error& e) {
    resp = error_response(e);
  } catch (const std::exception& e) {
    resp = error_response(Error("Internal", e.what()));
  }
  resp.headers["X-Cluster-Time"] = std::to_string(cp_.clock().now());
  return resp;
}

ApiResponse ApiHandler::dispatch(const ApiRequest& req) const {
  const auto parts = split_path(req.path);
  if (req.method == "GET" && req.path == "/healthz") return json_response(200, {{"status", "ok"}});
  if (req.method == "GET" && req.path == "/metrics") {
    return {200, render_exposition(cp_.metrics()), kExpositionContentType, {}};
  }
  if (parts.empty() || parts[0] != "api") throw Error("NotFound", "no route for " + req.path);
  if (req.method == "POST" && parts.size() == 2 && parts[1] == "apply") return apply(req.body);
  if (req.method == "GET" && parts.size() == 2) return list(parts[1]);
  if (req.method == "GET" && parts.size() == 3) return get_one(parts[1], parts[2]);
  if (req.method == "GET" && parts.size() == 4 && parts[3] == "logs" && canonical_kind(parts[1]) == "Pod") {
    return pod_logs(parts[2], req);
  }
  if (req.method == "DELETE" && parts.size() == 3) return remove(parts[1], parts[2]);
  throw Error("NotFound", "no route for " + req.method + " " + req.path);
}

ApiResponse ApiHandler::apply(const std::string& body) const {
  ordered_json doc;
  try {
    doc = ordered_json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error("SyntaxError", std::string("request body is not JSON: ") + e.what());
  }
  ClusterObject obj = decode_object(doc);
  std::string name;
  std::string kind(kind_of(obj));
  if (auto* node = std::get_if<NodeSpec>(&obj)) {
    name = cp_.store().register_node(*node);
  } else if (auto* job = std::get_if<JobSpec>(&obj)) {
    name = cp_.store().submit_job(*job);
  } else {
    name = cp_.store().create_pod(std::get<PodSpec>(obj));
  }
  cp_.nudge();
  return json_response(201, {{"kind", kind}, {"name", name}});
}

ApiResponse ApiHandler::list(const std::string& kind_text) const {
  const std::string kind = canonical_kind(kind_text);
  if (kind.empty()) throw Error("UnknownKind", "unknown kind " + kind_text);
  const ClusterState state = cp_.store().snapshot();
  ordered_json out = ordered_json::array();
  if (kind == "Node") {
    for (const auto& [n, o] : state.nodes) out.push_back(to_json(o));
  } else if (kind == "Job") {
    for (const auto& [n, o] : state.jobs) out.push_back(to_json(o));
  } else {
    for (const auto& [n, o] : state.pods) out.push_back(to_json(o));
  }
  return json_response(200, out);
}

ApiResponse ApiHandler::get_one(const std::string& kind_text, const std::string& name) const {
  const std::string kind = canonical_kind(kind_text);
  if (kind.empty()) throw Error("UnknownKind", "unknown kind " + kind_text);
  const ClusterState state = cp_.store().snapshot();
  auto find = [&](const auto& map) -> ordered_json {
    auto it = map.find(name);
    if (it == map.end()) throw Error("Unknown" + kind, kind + " " + name + " not found");
    return to_json(it->second);
  };
  if (kind == "Node") return json_response(200, find(state.nodes));
  if (kind == "Job") return json_response(200, find(state.jobs));
  return json_response(200, find(state.pods));
}

ApiResponse ApiHandler::pod_logs(const std::string& pod, const ApiRequest& req) const {
  int64_t since = -1;
  if (auto it = req.query.find("since"); it != req.query.end() && !it->second.empty()) {
    try {
      since = std::stoll(it->second);
    } catch (const std::exception&) {
      throw Error("BadRequest", "since must be an integer");
    }
  }
  ordered_json out = ordered_json::array();
  for (const auto& rec : collect_logs(pod, cp_.store(), since)) {
    out.push_back({{"seq", rec.seq}, {"ts", rec.timestamp}, {"line", rec.line}});
  }
  return json_response(200, out);
}

ApiResponse ApiHandler::remove(const std::string& kind_text, const std::string& name) const {
  const std::string kind = canonical_kind(kind_text);
  if (kind.empty()) throw Error("UnknownKind", "unknown kind " + kind_text);
  cp_.store().delete_object(kind, name);
  cp_.nudge();
  return json_response(200, {{"kind", kind}, {"name", name}, {"deleted", true}});
}

ApiResponse InProcessClient::request(const std::string& method, const std::string& target, const std::string& body) {
  return handler_.handle(ApiRequest::from_target(method, target, body));
}

struct HttpClient::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {}
};

HttpClient::HttpClient(const std::string& address) {
  auto [host, port] = remote::split_endpoint(address);
  impl_ = std::make_unique<Impl>(host, port);
  impl_->client.set_connection_timeout(std::chrono::seconds(2));
  impl_->client.set_read_timeout(std::chrono::seconds(30));
}

HttpClient::~HttpClient() = default;

ApiResponse HttpClient::request(const std::string& method, const std::string& target, const std::string& body) {
  httplib::Result res;
  if (method == "GET") {
    res = impl_->client.Get(target);
  } else if (method == "POST") {
    res = impl_->client.Post(target, body, "application/json");
  } else if (method == "DELETE") {
    res = impl_->client.Delete(target);
  } else {
    throw Error("BadRequest", "unsupported method " + method);
  }
  if (!res) throw Error("ServerUnreachable", "no response from server: " + httplib::to_string(res.error()));
  ApiResponse out{res->status, res->body, res->get_header_value("Content-Type"), {}};
  for (const auto& [k, v] : res->headers) out.headers[k] = v;
  return out;
}

struct ApiServer::Impl {
  const ApiHandler& handler;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  explicit Impl(const ApiHandler& h) : handler(h) {}
};

ApiServer::ApiServer(const ApiHandler& handler) : impl_(std::make_unique<Impl>(handler)) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    ApiResponse out = impl_->handler.handle(r);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
  impl_->server.Delete(".*", route);
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start(const std::string& address) {
  auto [host, port] = remote::split_endpoint(address);
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error("BindFailure", "cannot listen on " + address);
  impl_->host = host;
  impl_->port = bound;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void ApiServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

std::string ApiServer::address() const { return impl_->host + ":" + std::to_string(impl_->port); }

}  // namespace q8s
