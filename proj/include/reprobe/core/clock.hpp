// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <atomic>

#include "reprobe/core/types.hpp"

namespace reprobe {

class Clock {
  public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
};

class SystemClock final : public Clock {
  public:
    TimePoint now() const override {
        return std::chrono::time_point_cast<std::chrono::nanoseconds>(
            std::chrono::system_clock::now());
    }
};

/// Virtual time, moved only by explicit calls. Never goes backwards.
class ManualClock final : public Clock {
  public:
    // 2023-11-14T22:13:20Z; any positive epoch works.
    static constexpr std::int64_t kDefaultStartNanos = 1'700'000'000'000'000'000;

    explicit ManualClock(TimePoint start = from_unix_nanos(kDefaultStartNanos))
        : nanos_(to_unix_nanos(start)) {}

    TimePoint now() const override { return from_unix_nanos(nanos_.load()); }

    void set(TimePoint t) {
        auto target = to_unix_nanos(t);
        auto current = nanos_.load();
        while (target > current && !nanos_.compare_exchange_weak(current, target)) {
        }
    }

    void advance(std::chrono::nanoseconds d) { nanos_.fetch_add(d.count()); }

  private:
    std::atomic<std::int64_t> nanos_;
};

}  // namespace reprobe
