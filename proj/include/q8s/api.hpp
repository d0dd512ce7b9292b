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

// The control-plane HTTP API and its two clients. Routes:
//
//   POST   /api/apply                  one object as JSON   201 | 400 | 409
//   GET    /api/{nodes|pods|jobs}      JSON array
//   GET    /api/{kind}/{name}          one object           200 | 404
//   GET    /api/pods/{name}/logs?since=<seq>
//   DELETE /api/{kind}/{name}                               200 | 404 | 409
//   GET    /metrics                    text exposition
//   GET    /healthz
//
// Errors carry `{"error": <code>, "message": <text>}`. Every response has an
// X-Cluster-Time header with the cluster clock in milliseconds.

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "q8s/control_plane.hpp"

namespace q8s {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;

  /// Splits `path?key=value&...`; values are taken verbatim.
  static ApiRequest from_target(std::string method, std::string_view target, std::string body = "");
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
};

/// HTTP status for an error code.
int status_for(const std::string& error_code);

class ApiHandler {
 public:
  explicit ApiHandler(ControlPlane& cp) : cp_(cp) {}
  ApiResponse handle(const ApiRequest& req) const;

 private:
  ApiResponse dispatch(const ApiRequest& req) const;
  ApiResponse apply(const std::string& body) const;
  ApiResponse list(const std::string& kind) const;
  ApiResponse get_one(const std::string& kind, const std::string& name) const;
  ApiResponse pod_logs(const std::string& pod, const ApiRequest& req) const;
  ApiResponse remove(const std::string& kind, const std::string& name) const;

  ControlPlane& cp_;
};

class ApiClient {
 public:
  virtual ~ApiClient() = default;
  /// Throws ServerUnreachable when no response arrives.
  virtual ApiResponse request(const std::string& method, const std::string& target, const std::string& body = "") = 0;
};

/// Calls the handler directly; no sockets.
class InProcessClient final : public ApiClient {
 public:
  explicit InProcessClient(const ApiHandler& handler) : handler_(handler) {}
  ApiResponse request(const std::string& method, const std::string& target, const std::string& body) override;

 private:
  const ApiHandler& handler_;
};

class HttpClient final : public ApiClient {
 public:
  /// `address` is `host:port`.
  explicit HttpClient(const std::string& address);
  ~HttpClient() override;
  ApiResponse request(const std::string& method, const std::string& target, const std::string& body) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class ApiServer {
 public:
  explicit ApiServer(const ApiHandler& handler);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds `host:port` (port 0 picks a free one) and serves on a background
  /// thread. Errors: BindFailure.
  void start(const std::string& address);
  void stop();
  /// The bound `host:port`.
  std::string address() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace q8s
