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

// The remote-QPU stand-in and its client. Line protocol over TCP, UTF-8:
//
//   SUBMIT <base64(qasm)> <shots> <seed>   ->  ACCEPTED <jobid> | REJECTED <reason>
//   STATUS <jobid>                         ->  QUEUED | RUNNING | COMPLETED <json-counts> | FAILED <reason>
//
// Anything else gets `ERROR <reason>`. A job stays QUEUED for
// submitLatencyMs after submission. At most queueDepthCap jobs are QUEUED or
// RUNNING at once; further submissions are REJECTED. Every accepted job ends
// in exactly one of COMPLETED or FAILED.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "q8s/types.hpp"

namespace q8s::remote {

std::string base64_encode(std::string_view data);
std::optional<std::string> base64_decode(std::string_view text);

struct StubStats {
  int64_t submitted = 0;
  int64_t accepted = 0;
  int64_t rejected = 0;
  int64_t completed = 0;
  int64_t failed = 0;
};

class RemoteQpuStub {
 public:
  RemoteQpuStub(RemoteQpuConfig config, NoiseModel noise = {});
  ~RemoteQpuStub();

  RemoteQpuStub(const RemoteQpuStub&) = delete;
  RemoteQpuStub& operator=(const RemoteQpuStub&) = delete;

  /// Binds config.endpoint; port 0 picks a free port. Errors: BindFailure.
  void start();
  void stop();
  /// The bound `host:port`.
  std::string endpoint() const;
  StubStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class RemoteState { Queued, Running, Completed, Failed };

struct SubmitReply {
  bool accepted = false;
  /// Job id when accepted, otherwise the rejection reason.
  std::string detail;
};

struct StatusReply {
  RemoteState state = RemoteState::Queued;
  /// Counts JSON when completed, reason when failed.
  std::string detail;
};

/// One connection; requests are serial. Transport errors throw RemoteUnavailable.
class RemoteQpuClient {
 public:
  explicit RemoteQpuClient(const std::string& endpoint,
                           std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));
  ~RemoteQpuClient();

  SubmitReply submit(const std::string& qasm, int64_t shots, uint64_t seed);
  StatusReply status(const std::string& id);

 private:
  std::string round_trip(const std::string& line);

  struct Conn;
  std::unique_ptr<Conn> conn_;
};

/// Splits `host:port`. Errors: InvalidEndpoint.
std::pair<std::string, uint16_t> split_endpoint(const std::string& endpoint);

}  // namespace q8s::remote
