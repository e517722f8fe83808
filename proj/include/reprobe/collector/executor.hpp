// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "reprobe/core/clock.hpp"
#include "reprobe/core/types.hpp"

namespace reprobe {

/// Something the executor runs repeatedly with fixed-delay spacing: the next
/// step starts next_delay() after the previous one completed.
class Worker {
  public:
    virtual ~Worker() = default;
    virtual Duration next_delay() const = 0;
    /// Returns false once the worker has nothing left to do.
    virtual bool step(TimePoint now) = 0;
};

class Executor {
  public:
    virtual ~Executor() = default;
    virtual const Clock& clock() const = 0;
    /// The first step runs immediately.
    virtual void attach(const std::string& id, std::shared_ptr<Worker> worker) = 0;
    /// Once this returns, the worker is never stepped again. Unknown ids are ignored.
    virtual void detach(const std::string& id) = 0;
    /// Re-reads next_delay() of a waiting worker, e.g. after a period change.
    virtual void wake(const std::string& id) = 0;
};

/// Wall-clock executor: one thread per worker.
class ThreadExecutor final : public Executor {
  public:
    ThreadExecutor();
    ~ThreadExecutor() override;

    const Clock& clock() const override { return clock_; }
    void attach(const std::string& id, std::shared_ptr<Worker> worker) override;
    void detach(const std::string& id) override;
    void wake(const std::string& id) override;

  private:
    struct Slot;
    void run(Slot& slot);

    SystemClock clock_;
    std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Slot>> slots_;
};

/// Deterministic virtual-time executor. Nothing runs until advance() or
/// run_until() is called; steps then execute in due-time order (ties broken by
/// attach order) on the calling thread, with the clock set to each due time.
class VirtualExecutor final : public Executor {
  public:
    explicit VirtualExecutor(std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>());

    const Clock& clock() const override { return *clock_; }
    ManualClock& manual_clock() { return *clock_; }

    void attach(const std::string& id, std::shared_ptr<Worker> worker) override;
    void detach(const std::string& id) override;
    void wake(const std::string&) override {}

    void advance(std::chrono::nanoseconds d);
    void run_until(TimePoint t);
    std::size_t size() const;

  private:
    struct Entry {
        std::shared_ptr<Worker> worker;
        TimePoint last;
        bool started = false;
        std::uint64_t seq = 0;
    };

    std::shared_ptr<ManualClock> clock_;
    mutable std::mutex mutex_;
    std::mutex run_mutex_;  // one advance() at a time
    std::map<std::string, Entry> entries_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace reprobe
