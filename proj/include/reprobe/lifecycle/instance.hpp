// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reprobe/bus/data_manager.hpp"
#include "reprobe/collector/collector.hpp"
#include "reprobe/collector/executor.hpp"
#include "reprobe/plugins/sinks.hpp"

namespace reprobe {

enum class InstanceState { Created, Running, Reconfiguring, Stopped, Failed };

std::string_view to_string(InstanceState state) noexcept;
bool is_terminal(InstanceState state) noexcept;
bool is_live(InstanceState state) noexcept;
/// Created->Running, Running<->Reconfiguring, Running->Stopped, non-terminal->Failed.
bool legal_transition(InstanceState from, InstanceState to) noexcept;

struct StateChange {
    InstanceState from;
    InstanceState to;
    TimePoint at;
};

/// Thread-safe state holder that refuses illegal transitions.
class StateMachine {
  public:
    InstanceState state() const;
    /// Throws Error(IllegalState) if the transition is not in the table.
    void transition(InstanceState to, TimePoint at);
    /// Returns false instead of throwing.
    bool try_transition(InstanceState to, TimePoint at);
    std::vector<StateChange> history() const;

  private:
    mutable std::mutex mutex_;
    InstanceState state_ = InstanceState::Created;
    std::vector<StateChange> history_;
};

struct InstanceRecord {
    std::string instance_id;
    std::string plugin_id;
    PluginKind kind = PluginKind::Collector;
    InstanceState state = InstanceState::Created;
    InstanceConfig config;
    TimePoint started_at{};
    std::optional<std::string> last_error;
};

/// A plugin instance. It is also the Worker the executor steps.
class Instance : public Worker {
  public:
    Instance(std::string id, std::string plugin_id, PluginKind kind, const Clock& clock);

    const std::string& id() const { return id_; }
    const std::string& plugin_id() const { return plugin_id_; }
    PluginKind kind() const { return kind_; }
    InstanceState state() const { return machine_.state(); }
    std::optional<std::string> last_error() const;
    TimePoint started_at() const { return started_at_; }
    std::vector<StateChange> history() const { return machine_.history(); }
    InstanceRecord record() const;

    virtual InstanceConfig config() const = 0;
    /// Created -> Running. Throws (typically SpawnFailed) after moving to Failed.
    virtual void start() = 0;
    /// Applies a partial config atomically. Throws Error(InvalidConfig).
    virtual InstanceConfig reconfigure(const ConfigPatch& patch) = 0;
    /// Releases resources and moves to Stopped. The executor must have detached first.
    virtual void stop() = 0;

    StateMachine& machine() { return machine_; }
    /// Moves to Failed (if not terminal yet) and records `error`.
    void fail(const std::string& error);

  protected:
    void set_last_error(std::string error);
    const Clock& clock_;

  private:
    const std::string id_;
    const std::string plugin_id_;
    const PluginKind kind_;
    TimePoint started_at_{};
    StateMachine machine_;
    mutable std::mutex error_mutex_;
    std::optional<std::string> last_error_;
};

class CollectorInstance final : public Instance {
  public:
    CollectorInstance(std::string id, const Clock& clock, std::unique_ptr<CollectorRuntime> runtime);

    Duration next_delay() const override { return runtime_->effective_period(); }
    bool step(TimePoint now) override;

    InstanceConfig config() const override { return runtime_->config(); }
    void start() override;
    InstanceConfig reconfigure(const ConfigPatch& patch) override;
    void stop() override;

    CollectorRuntime& runtime() { return *runtime_; }
    const CollectorRuntime& runtime() const { return *runtime_; }

  private:
    std::unique_ptr<CollectorRuntime> runtime_;
};

struct PublisherStats {
    std::uint64_t batches = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed_batches = 0;
    std::uint64_t lost = 0;
    std::uint64_t abandoned = 0;  // still queued when the drain deadline passed
    SinkStats sink;
};

/// Drains its Data Manager subscription into a sink.
class PublisherInstance final : public Instance {
  public:
    struct Options {
        Duration poll_interval{20};
        Duration drain_deadline{2000};
        PeriodBounds bounds;
        ExtraConfigCheck extra_check;
    };

    PublisherInstance(std::string id, const Clock& clock, PluginDescriptor descriptor,
                      InstanceConfig config, std::unique_ptr<Sink> sink, DataManager& bus,
                      Options options);

    Duration next_delay() const override { return options_.poll_interval; }
    bool step(TimePoint now) override;

    InstanceConfig config() const override;
    void start() override;
    InstanceConfig reconfigure(const ConfigPatch& patch) override;
    void stop() override;

    PublisherStats stats() const;
    /// Drains everything currently queued into the sink (tests and shutdown).
    std::size_t flush();

  private:
    std::size_t pump_locked(std::size_t max_batches);
    void deliver_locked(std::vector<Observation> batch);
    std::size_t batch_size_locked() const;
    std::size_t capacity_locked() const;

    const PluginDescriptor descriptor_;
    std::unique_ptr<Sink> sink_;
    DataManager& bus_;
    const Options options_;

    mutable std::mutex mutex_;
    InstanceConfig config_;
    PublisherStats stats_;
    bool subscribed_ = false;
};

}  // namespace reprobe
