// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/lifecycle/instance.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

std::string_view to_string(InstanceState state) noexcept {
    switch (state) {
        case InstanceState::Created: return "Created";
        case InstanceState::Running: return "Running";
        case InstanceState::Reconfiguring: return "Reconfiguring";
        case InstanceState::Stopped: return "Stopped";
        case InstanceState::Failed: return "Failed";
    }
    return "?";
}

bool is_terminal(InstanceState state) noexcept {
    return state == InstanceState::Stopped || state == InstanceState::Failed;
}

bool is_live(InstanceState state) noexcept { return !is_terminal(state); }

bool legal_transition(InstanceState from, InstanceState to) noexcept {
    using S = InstanceState;
    if (is_terminal(from)) return false;
    if (to == S::Failed) return true;
    return (from == S::Created && to == S::Running) || (from == S::Running && to == S::Reconfiguring) ||
           (from == S::Reconfiguring && to == S::Running) || (from == S::Running && to == S::Stopped);
}

InstanceState StateMachine::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

void StateMachine::transition(InstanceState to, TimePoint at) {
    std::lock_guard lock(mutex_);
    if (!legal_transition(state_, to)) {
        throw Error(ErrorCode::IllegalState, "illegal transition " + std::string(to_string(state_)) +
                                                 " -> " + std::string(to_string(to)));
    }
    history_.push_back(StateChange{state_, to, at});
    state_ = to;
}

bool StateMachine::try_transition(InstanceState to, TimePoint at) {
    std::lock_guard lock(mutex_);
    if (!legal_transition(state_, to)) return false;
    history_.push_back(StateChange{state_, to, at});
    state_ = to;
    return true;
}

std::vector<StateChange> StateMachine::history() const {
    std::lock_guard lock(mutex_);
    return history_;
}

Instance::Instance(std::string id, std::string plugin_id, PluginKind kind, const Clock& clock)
    : clock_(clock),
      id_(std::move(id)),
      plugin_id_(std::move(plugin_id)),
      kind_(kind),
      started_at_(clock.now()) {}

std::optional<std::string> Instance::last_error() const {
    std::lock_guard lock(error_mutex_);
    return last_error_;
}

void Instance::set_last_error(std::string error) {
    std::lock_guard lock(error_mutex_);
    last_error_ = std::move(error);
}

void Instance::fail(const std::string& error) {
    set_last_error(error);
    if (machine_.try_transition(InstanceState::Failed, clock_.now())) {
        spdlog::error("instance '{}' failed: {}", id_, error);
    }
}

InstanceRecord Instance::record() const {
    return InstanceRecord{id_, plugin_id_, kind_, state(), config(), started_at_, last_error()};
}

CollectorInstance::CollectorInstance(std::string id, const Clock& clock,
                                     std::unique_ptr<CollectorRuntime> runtime)
    : Instance(std::move(id), runtime->descriptor().id, PluginKind::Collector, clock),
      runtime_(std::move(runtime)) {}

bool CollectorInstance::step(TimePoint now) {
    if (is_terminal(state())) return false;
    const auto report = runtime_->run_tick(now);
    if (report.status == CollectorRuntime::TickStatus::Failed) {
        fail(runtime_->stats().last_error.value_or("sampler failure"));
        return false;
    }
    if (report.status == CollectorRuntime::TickStatus::Skipped) {
        set_last_error(runtime_->stats().last_error.value_or("tick skipped"));
    }
    return true;
}

void CollectorInstance::start() {
    try {
        runtime_->start();
    } catch (const std::exception& e) {
        fail(e.what());
        throw;
    }
    machine().transition(InstanceState::Running, clock_.now());
}

InstanceConfig CollectorInstance::reconfigure(const ConfigPatch& patch) {
    return runtime_->controller_apply(ChangeSource::Api, patch, "api");
}

void CollectorInstance::stop() {
    try {
        runtime_->stop();
    } catch (const std::exception& e) {
        spdlog::warn("collector '{}' stop: {}", id(), e.what());
    }
    machine().try_transition(InstanceState::Stopped, clock_.now());
}

PublisherInstance::PublisherInstance(std::string id, const Clock& clock, PluginDescriptor descriptor,
                                     InstanceConfig config, std::unique_ptr<Sink> sink,
                                     DataManager& bus, Options options)
    : Instance(std::move(id), descriptor.id, PluginKind::Publisher, clock),
      descriptor_(std::move(descriptor)),
      sink_(std::move(sink)),
      bus_(bus),
      options_(std::move(options)),
      config_(std::move(config)) {}

std::size_t PublisherInstance::batch_size_locked() const {
    return static_cast<std::size_t>(config_.param<std::int64_t>("batchSize").value_or(256));
}

std::size_t PublisherInstance::capacity_locked() const {
    return static_cast<std::size_t>(config_.param<std::int64_t>("capacity").value_or(1024));
}

InstanceConfig PublisherInstance::config() const {
    std::lock_guard lock(mutex_);
    return config_;
}

void PublisherInstance::start() {
    std::lock_guard lock(mutex_);
    try {
        sink_->start(config_);
        bus_.subscribe(id(), TopicFilter(config_.topics), capacity_locked());
        subscribed_ = true;
    } catch (const std::exception& e) {
        try {
            sink_->close();
        } catch (const std::exception&) {
        }
        fail(e.what());
        throw;
    }
    machine().transition(InstanceState::Running, clock_.now());
}

void PublisherInstance::deliver_locked(std::vector<Observation> batch) {
    try {
        sink_->publish(batch);
        ++stats_.batches;
        stats_.delivered += batch.size();
    } catch (const std::exception& e) {
        ++stats_.failed_batches;
        stats_.lost += batch.size();
        set_last_error(e.what());
        spdlog::warn("publisher '{}' lost {} observations: {}", id(), batch.size(), e.what());
    }
}

std::size_t PublisherInstance::pump_locked(std::size_t max_batches) {
    std::size_t moved = 0;
    const std::size_t batch_size = batch_size_locked();
    for (std::size_t i = 0; i < max_batches; ++i) {
        auto batch = bus_.drain(id(), batch_size);
        if (batch.empty()) break;
        moved += batch.size();
        deliver_locked(std::move(batch));
    }
    return moved;
}

bool PublisherInstance::step(TimePoint) {
    std::lock_guard lock(mutex_);
    if (is_terminal(state()) || !subscribed_) return false;
    pump_locked(16);
    if (!sink_->alive()) {
        fail("sink process is gone");
        bus_.unsubscribe(id());
        subscribed_ = false;
        return false;
    }
    return true;
}

std::size_t PublisherInstance::flush() {
    std::lock_guard lock(mutex_);
    if (!subscribed_) return 0;
    return pump_locked(std::numeric_limits<std::size_t>::max());
}

InstanceConfig PublisherInstance::reconfigure(const ConfigPatch& patch) {
    std::lock_guard lock(mutex_);
    if (patch.plugin_id && *patch.plugin_id != descriptor_.id) {
        throw Error(ErrorCode::InvalidConfig, "pluginId cannot be changed",
                    {{ErrorCode::InvalidConfig, "pluginId", "instances cannot be rebound"}});
    }
    InstanceConfig next = validate_or_throw(apply_patch(config_, patch), descriptor_,
                                            PluginKind::Publisher, options_.bounds,
                                            options_.extra_check);
    const auto capacity = static_cast<std::size_t>(next.param<std::int64_t>("capacity").value_or(1024));
    TopicFilter filter(next.topics);
    try {
        sink_->configure(next);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw;
        throw Error(ErrorCode::InvalidConfig, e.what(), e.details());
    }
    if (subscribed_) bus_.update(id(), std::move(filter), capacity);
    config_ = std::move(next);
    return config_;
}

void PublisherInstance::stop() {
    std::lock_guard lock(mutex_);
    if (subscribed_) {
        const auto deadline = std::chrono::steady_clock::now() + options_.drain_deadline;
        const std::size_t batch_size = batch_size_locked();
        while (std::chrono::steady_clock::now() < deadline) {
            auto batch = bus_.drain(id(), batch_size);
            if (batch.empty()) break;
            deliver_locked(std::move(batch));
        }
        for (const auto& [sub, s] : bus_.stats()) {
            if (sub == id()) stats_.abandoned += s.depth;
        }
        bus_.unsubscribe(id());
        subscribed_ = false;
    }
    try {
        sink_->close();
    } catch (const std::exception& e) {
        spdlog::warn("publisher '{}' close: {}", id(), e.what());
    }
    machine().try_transition(InstanceState::Stopped, clock_.now());
}

PublisherStats PublisherInstance::stats() const {
    std::lock_guard lock(mutex_);
    PublisherStats out = stats_;
    out.sink = sink_->stats();
    return out;
}

}  // namespace reprobe
