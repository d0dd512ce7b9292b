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

#include <atomic>
#include <chrono>

#include "q8s/types.hpp"

namespace q8s {

/// One observability tick in milliseconds of cluster time.
constexpr Instant kTickMs = 1000;

class Clock {
 public:
  virtual ~Clock() = default;
  /// Milliseconds since the Unix epoch (wall) or since start (virtual).
  virtual Instant now() const = 0;
  virtual bool is_virtual() const = 0;
};

class WallClock final : public Clock {
 public:
  Instant now() const override {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  }
  bool is_virtual() const override { return false; }
};

/// Only moves when told to. Never goes backwards.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Instant start = 0) : now_(start) {}

  Instant now() const override { return now_.load(); }
  bool is_virtual() const override { return true; }

  void advance(Instant ms) { now_.fetch_add(ms < 0 ? 0 : ms); }
  void advance_to(Instant t) {
    Instant cur = now_.load();
    while (t > cur && !now_.compare_exchange_weak(cur, t)) {
    }
  }

 private:
  std::atomic<Instant> now_;
};

}  // namespace q8s
