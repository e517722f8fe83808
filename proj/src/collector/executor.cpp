// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/collector/executor.hpp"

#include <optional>

#include <spdlog/spdlog.h>

namespace reprobe {

struct ThreadExecutor::Slot {
    std::shared_ptr<Worker> worker;
    std::mutex mutex;
    std::condition_variable cv;
    bool stop = false;
    bool woken = false;
    std::thread thread;
};

ThreadExecutor::ThreadExecutor() = default;

ThreadExecutor::~ThreadExecutor() {
    std::map<std::string, std::unique_ptr<Slot>> slots;
    {
        std::lock_guard lock(mutex_);
        slots.swap(slots_);
    }
    for (auto& [id, slot] : slots) {
        {
            std::lock_guard lock(slot->mutex);
            slot->stop = true;
        }
        slot->cv.notify_all();
        if (slot->thread.joinable()) slot->thread.join();
    }
}

void ThreadExecutor::attach(const std::string& id, std::shared_ptr<Worker> worker) {
    detach(id);
    auto slot = std::make_unique<Slot>();
    slot->worker = std::move(worker);
    Slot& ref = *slot;
    std::lock_guard lock(mutex_);
    slots_[id] = std::move(slot);
    ref.thread = std::thread([this, &ref] { run(ref); });
}

void ThreadExecutor::detach(const std::string& id) {
    std::unique_ptr<Slot> slot;
    {
        std::lock_guard lock(mutex_);
        auto it = slots_.find(id);
        if (it == slots_.end()) return;
        slot = std::move(it->second);
        slots_.erase(it);
    }
    {
        std::lock_guard lock(slot->mutex);
        slot->stop = true;
    }
    slot->cv.notify_all();
    if (slot->thread.joinable()) {
        if (slot->thread.get_id() == std::this_thread::get_id()) {
            slot->thread.detach();  // a worker tearing itself down; it exits after this step
        } else {
            slot->thread.join();
        }
    }
}

void ThreadExecutor::wake(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) return;
    {
        std::lock_guard slock(it->second->mutex);
        it->second->woken = true;
    }
    it->second->cv.notify_all();
}

void ThreadExecutor::run(Slot& slot) {
    using steady = std::chrono::steady_clock;
    std::optional<steady::time_point> last;
    for (;;) {
        {
            std::unique_lock lock(slot.mutex);
            while (!slot.stop && last) {
                const auto deadline = *last + slot.worker->next_delay();
                if (!slot.cv.wait_until(lock, deadline, [&] { return slot.stop || slot.woken; })) {
                    break;  // deadline reached
                }
                slot.woken = false;  // re-read next_delay()
            }
            if (slot.stop) return;
        }
        bool keep = false;
        try {
            keep = slot.worker->step(clock_.now());
        } catch (const std::exception& e) {
            spdlog::error("worker step threw: {}", e.what());
        }
        last = steady::now();
        if (!keep) return;
    }
}

VirtualExecutor::VirtualExecutor(std::shared_ptr<ManualClock> clock) : clock_(std::move(clock)) {}

void VirtualExecutor::attach(const std::string& id, std::shared_ptr<Worker> worker) {
    std::lock_guard lock(mutex_);
    entries_[id] = Entry{std::move(worker), clock_->now(), false, next_seq_++};
}

void VirtualExecutor::detach(const std::string& id) {
    std::lock_guard lock(mutex_);
    entries_.erase(id);
}

std::size_t VirtualExecutor::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void VirtualExecutor::advance(std::chrono::nanoseconds d) { run_until(clock_->now() + d); }

void VirtualExecutor::run_until(TimePoint until) {
    std::lock_guard run_lock(run_mutex_);
    for (;;) {
        std::unique_lock lock(mutex_);
        const std::string* best_id = nullptr;
        Entry* best = nullptr;
        TimePoint best_due{};
        for (auto& [id, entry] : entries_) {
            const TimePoint due = entry.started ? entry.last + entry.worker->next_delay() : entry.last;
            if (best == nullptr || due < best_due || (due == best_due && entry.seq < best->seq)) {
                best = &entry;
                best_id = &id;
                best_due = due;
            }
        }
        if (best == nullptr || best_due > until) break;
        clock_->set(best_due);
        const std::string id = *best_id;
        auto worker = best->worker;
        // The step runs under mutex_ so that detach() cannot return mid-step.
        bool keep = false;
        try {
            keep = worker->step(clock_->now());
        } catch (const std::exception& e) {
            spdlog::error("worker '{}' step threw: {}", id, e.what());
        }
        auto it = entries_.find(id);
        if (it != entries_.end() && it->second.worker == worker) {
            if (keep) {
                it->second.last = clock_->now();
                it->second.started = true;
            } else {
                entries_.erase(it);
            }
        }
    }
    clock_->set(until);
}

}  // namespace reprobe
