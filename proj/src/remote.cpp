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

#include "q8s/remote.hpp"

#include <openssl/evp.h>

#include <boost/asio.hpp>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "q8s/error.hpp"
#include "q8s/qasm.hpp"
#include "q8s/rng.hpp"
#include "q8s/simulator.hpp"

namespace q8s::remote {

namespace asio = boost::asio;
using asio::ip::tcp;
using SteadyClock = std::chrono::steady_clock;

std::string base64_encode(std::string_view data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::string out(3 * text.size() / 4, '\0');
  int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  // EVP_DecodeBlock counts padding bytes as output.
  size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<size_t>(n) - pad);
  return out;
}

std::pair<std::string, uint16_t> split_endpoint(const std::string& endpoint) {
  size_t colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0) throw Error("InvalidEndpoint", "endpoint must be host:port");
  unsigned port = 0;
  const char* b = endpoint.data() + colon + 1;
  const char* e = endpoint.data() + endpoint.size();
  auto [ptr, ec] = std::from_chars(b, e, port);
  if (ec != std::errc() || ptr != e || b == e || port > 65535) {
    throw Error("InvalidEndpoint", "bad port in endpoint " + endpoint);
  }
  return {endpoint.substr(0, colon), static_cast<uint16_t>(port)};
}

namespace {

enum class JobState { Queued, Running, Completed, Failed };

struct StubJob {
  Circuit circuit;
  int64_t shots = 0;
  uint64_t seed = 0;
  SteadyClock::time_point due;
  JobState state = JobState::Queued;
  std::string detail;
};

template <typename T>
std::optional<T> number(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

struct RemoteQpuStub::Impl {
  RemoteQpuConfig config;
  NoiseModel noise;
  asio::io_context io;
  std::optional<tcp::acceptor> acceptor;
  std::thread io_thread;
  std::thread worker;
  std::string bound;

  mutable std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  std::map<uint64_t, StubJob> jobs;
  std::deque<uint64_t> queue;
  uint64_t next_id = 1;
  int64_t executed = 0;
  Xoshiro256 fault_rng{0};
  StubStats stats;

  std::string handle(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto words = split_words(line);
    if (words.empty()) return "ERROR empty request";
    if (words[0] == "SUBMIT") return submit(words);
    if (words[0] == "STATUS") return status(words);
    return "ERROR unknown command " + std::string(words[0]);
  }

  std::string submit(const std::vector<std::string_view>& w) {
    std::lock_guard lock(mu);
    ++stats.submitted;
    auto reject = [&](const std::string& why) {
      ++stats.rejected;
      return "REJECTED " + why;
    };
    if (w.size() != 4) return reject("usage: SUBMIT <base64> <shots> <seed>");
    auto shots = number<int64_t>(w[2]);
    auto seed = number<uint64_t>(w[3]);
    if (!shots || *shots < 1 || !seed) return reject("bad shots or seed");
    auto source = base64_decode(w[1]);
    if (!source) return reject("circuit is not base64");
    StubJob job;
    try {
      job.circuit = parse_qasm(*source);
    } catch (const Error& e) {
      return reject(std::string("invalid circuit: ") + e.what());
    }
    int live = 0;
    for (const auto& [id, j] : jobs) live += j.state == JobState::Queued || j.state == JobState::Running;
    if (live >= config.queue_depth_cap) return reject("queue full");
    job.shots = *shots;
    job.seed = *seed;
    job.due = SteadyClock::now() + std::chrono::milliseconds(config.submit_latency_ms);
    uint64_t id = next_id++;
    jobs.emplace(id, std::move(job));
    queue.push_back(id);
    ++stats.accepted;
    cv.notify_all();
    return "ACCEPTED " + std::to_string(id);
  }

  std::string status(const std::vector<std::string_view>& w) {
    std::lock_guard lock(mu);
    if (w.size() != 2) return "ERROR usage: STATUS <jobid>";
    auto id = number<uint64_t>(w[1]);
    auto it = id ? jobs.find(*id) : jobs.end();
    if (it == jobs.end()) return "ERROR unknown job";
    switch (it->second.state) {
      case JobState::Queued: return "QUEUED";
      case JobState::Running: return "RUNNING";
      case JobState::Completed: return "COMPLETED " + it->second.detail;
      case JobState::Failed: return "FAILED " + it->second.detail;
    }
    return "ERROR";
  }

  // Serial executor: jobs run one at a time in submission order.
  void work() {
    std::unique_lock lock(mu);
    while (true) {
      cv.wait(lock, [&] { return stopping || !queue.empty(); });
      if (stopping) return;
      uint64_t id = queue.front();
      if (cv.wait_until(lock, jobs.at(id).due, [&] { return stopping; })) return;
      queue.pop_front();
      StubJob& job = jobs.at(id);
      job.state = JobState::Running;
      bool fail = executed < config.fail_first ||
                  (config.failure_prob > 0.0 && fault_rng.uniform() < config.failure_prob);
      ++executed;
      Circuit circuit = job.circuit;
      int64_t shots = job.shots;
      uint64_t seed = job.seed;
      lock.unlock();
      std::string detail;
      bool ok = !fail;
      if (fail) {
        detail = "device error (injected)";
      } else {
        try {
          Counts counts = run_circuit(circuit, shots, seed, noise);
          detail = nlohmann::json(counts.histogram).dump();
        } catch (const Error& e) {
          ok = false;
          detail = e.code() + ": " + e.what();
        }
      }
      lock.lock();
      StubJob& done = jobs.at(id);
      done.state = ok ? JobState::Completed : JobState::Failed;
      done.detail = detail;
      ++(ok ? stats.completed : stats.failed);
    }
  }

  struct Session : std::enable_shared_from_this<Session> {
    Session(tcp::socket s, Impl& impl) : socket(std::move(s)), buf(1 << 22), owner(impl) {}
    tcp::socket socket;
    asio::streambuf buf;
    std::string reply;
    Impl& owner;

    void read() {
      auto self = shared_from_this();
      asio::async_read_until(socket, buf, '\n', [self](boost::system::error_code ec, size_t n) {
        if (ec) return;
        std::string line(asio::buffers_begin(self->buf.data()), asio::buffers_begin(self->buf.data()) + n - 1);
        self->buf.consume(n);
        self->reply = self->owner.handle(line) + "\n";
        asio::async_write(self->socket, asio::buffer(self->reply), [self](boost::system::error_code ec2, size_t) {
          if (!ec2) self->read();
        });
      });
    }
  };

  void accept() {
    acceptor->async_accept([this](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Session>(std::move(socket), *this)->read();
      accept();
    });
  }
};

RemoteQpuStub::RemoteQpuStub(RemoteQpuConfig config, NoiseModel noise) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->noise = noise;
  impl_->fault_rng = Xoshiro256(impl_->config.seed);
}

RemoteQpuStub::~RemoteQpuStub() { stop(); }

void RemoteQpuStub::start() {
  auto [host, port] = split_endpoint(impl_->config.endpoint.empty() ? "127.0.0.1:0" : impl_->config.endpoint);
  try {
    tcp::resolver resolver(impl_->io);
    auto results = resolver.resolve(host, std::to_string(port));
    tcp::endpoint ep = results.begin()->endpoint();
    impl_->acceptor.emplace(impl_->io);
    impl_->acceptor->open(ep.protocol());
    impl_->acceptor->set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor->bind(ep);
    impl_->acceptor->listen();
    auto local = impl_->acceptor->local_endpoint();
    impl_->bound = local.address().to_string() + ":" + std::to_string(local.port());
  } catch (const boost::system::system_error& e) {
    throw Error("BindFailure", "cannot listen on " + impl_->config.endpoint + ": " + e.what());
  }
  impl_->accept();
  impl_->io_thread = std::thread([this] { impl_->io.run(); });
  impl_->worker = std::thread([this] { impl_->work(); });
}

void RemoteQpuStub::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->io.stop();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
  if (impl_->worker.joinable()) impl_->worker.join();
}

std::string RemoteQpuStub::endpoint() const { return impl_->bound; }

StubStats RemoteQpuStub::stats() const {
  std::lock_guard lock(impl_->mu);
  return impl_->stats;
}

struct RemoteQpuClient::Conn {
  tcp::iostream stream;
  std::chrono::milliseconds timeout;
};

RemoteQpuClient::RemoteQpuClient(const std::string& endpoint, std::chrono::milliseconds timeout)
    : conn_(std::make_unique<Conn>()) {
  std::pair<std::string, uint16_t> hp;
  try {
    hp = split_endpoint(endpoint);
  } catch (const Error& e) {
    throw Error("RemoteUnavailable", e.what());
  }
  conn_->timeout = timeout;
  conn_->stream.expires_after(timeout);
  conn_->stream.connect(hp.first, std::to_string(hp.second));
  if (!conn_->stream) {
    throw Error("RemoteUnavailable", "cannot connect to " + endpoint + ": " + conn_->stream.error().message());
  }
}

RemoteQpuClient::~RemoteQpuClient() = default;

std::string RemoteQpuClient::round_trip(const std::string& line) {
  // The deadline is absolute, so each request gets a fresh one.
  conn_->stream.expires_after(conn_->timeout);
  conn_->stream << line << '\n' << std::flush;
  std::string reply;
  if (!conn_->stream || !std::getline(conn_->stream, reply)) {
    throw Error("RemoteUnavailable", "connection to remote QPU lost");
  }
  return reply;
}

SubmitReply RemoteQpuClient::submit(const std::string& qasm, int64_t shots, uint64_t seed) {
  std::string reply = round_trip("SUBMIT " + base64_encode(qasm) + " " + std::to_string(shots) + " " +
                                 std::to_string(seed));
  if (reply.rfind("ACCEPTED ", 0) == 0) return {true, reply.substr(9)};
  if (reply.rfind("REJECTED ", 0) == 0) return {false, reply.substr(9)};
  throw Error("RemoteUnavailable", "unexpected reply: " + reply);
}

StatusReply RemoteQpuClient::status(const std::string& id) {
  std::string reply = round_trip("STATUS " + id);
  if (reply == "QUEUED") return {RemoteState::Queued, ""};
  if (reply == "RUNNING") return {RemoteState::Running, ""};
  if (reply.rfind("COMPLETED ", 0) == 0) return {RemoteState::Completed, reply.substr(10)};
  if (reply.rfind("FAILED ", 0) == 0) return {RemoteState::Failed, reply.substr(7)};
  throw Error("RemoteUnavailable", "unexpected reply: " + reply);
}

}  // namespace q8s::remote
