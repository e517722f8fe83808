// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/lifecycle/manager.hpp"

#include <spdlog/spdlog.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

LifecycleManager::LifecycleManager(PluginKind kind, PluginRegistry& registry, DataManager& bus,
                                   Executor& executor, Options options)
    : kind_(kind), registry_(registry), bus_(bus), executor_(executor), options_(options) {}

LifecycleManager::~LifecycleManager() { shutdown(); }

std::string LifecycleManager::next_id_locked() {
    const char* prefix = kind_ == PluginKind::Collector ? "col-" : "pub-";
    for (;;) {
        std::string id = prefix + std::to_string(++generated_);
        if (!instances_.contains(id)) return id;
    }
}

InstanceRecord LifecycleManager::instantiate(const InstanceConfig& cfg, std::string instance_id) {
    std::lock_guard mutation(mutation_mutex_);
    auto entry = registry_.get(cfg.plugin_id);
    if (entry->descriptor.kind != kind_) {
        throw Error(ErrorCode::InvalidConfig,
                    "plugin '" + cfg.plugin_id + "' is a " + std::string(to_string(entry->descriptor.kind)),
                    {{ErrorCode::InvalidConfig, "pluginId",
                      "expected a " + std::string(to_string(kind_)) + " plugin"}});
    }
    InstanceConfig validated =
        validate_or_throw(cfg, entry->descriptor, kind_, options_.bounds, entry->extra_check);

    {
        std::unique_lock lock(map_mutex_);
        if (instance_id.empty()) {
            instance_id = next_id_locked();
        } else if (auto it = instances_.find(instance_id);
                   it != instances_.end() && is_live(it->second->state())) {
            throw Error(ErrorCode::InstanceExists, "instance '" + instance_id + "' already exists");
        }
    }

    std::shared_ptr<Instance> instance;
    if (kind_ == PluginKind::Collector) {
        CollectorRuntime::Options ro;
        ro.bounds = options_.bounds;
        ro.extra_check = entry->extra_check;
        ro.failure_threshold = options_.failure_threshold;
        auto runtime = std::make_unique<CollectorRuntime>(
            instance_id, entry->descriptor, validated, entry->make_collector(instance_id, validated),
            bus_, ro);
        instance = std::make_shared<CollectorInstance>(instance_id, executor_.clock(), std::move(runtime));
    } else {
        PublisherInstance::Options po;
        po.poll_interval = options_.publisher_poll;
        po.drain_deadline = options_.drain_deadline;
        po.bounds = options_.bounds;
        po.extra_check = entry->extra_check;
        instance = std::make_shared<PublisherInstance>(instance_id, executor_.clock(), entry->descriptor,
                                                       validated, entry->make_sink(instance_id, validated),
                                                       bus_, po);
    }

    {
        std::unique_lock lock(map_mutex_);
        instances_[instance_id] = instance;
    }
    instance->start();  // on failure the record stays, Failed
    executor_.attach(instance_id, instance);
    spdlog::info("{} '{}' of plugin '{}' is running", to_string(kind_), instance_id, cfg.plugin_id);
    return instance->record();
}

void LifecycleManager::destroy(const std::string& instance_id) {
    std::lock_guard mutation(mutation_mutex_);
    auto instance = get(instance_id);
    executor_.detach(instance_id);
    if (is_terminal(instance->state())) {
        throw Error(ErrorCode::AlreadyTerminal, "instance '" + instance_id + "' is already " +
                                                    std::string(to_string(instance->state())));
    }
    instance->stop();
    spdlog::info("{} '{}' stopped", to_string(kind_), instance_id);
}

InstanceConfig LifecycleManager::reconfigure(const std::string& instance_id, const ConfigPatch& patch) {
    std::lock_guard mutation(mutation_mutex_);
    auto instance = get(instance_id);
    const TimePoint now = executor_.clock().now();
    if (!instance->machine().try_transition(InstanceState::Reconfiguring, now)) {
        throw Error(ErrorCode::IllegalState, "instance '" + instance_id + "' is " +
                                                 std::string(to_string(instance->state())) +
                                                 ", not Running");
    }
    try {
        auto effective = instance->reconfigure(patch);
        instance->machine().try_transition(InstanceState::Running, executor_.clock().now());
        executor_.wake(instance_id);
        return effective;
    } catch (...) {
        instance->machine().try_transition(InstanceState::Running, executor_.clock().now());
        throw;
    }
}

std::shared_ptr<Instance> LifecycleManager::find(const std::string& instance_id) const {
    std::shared_lock lock(map_mutex_);
    auto it = instances_.find(instance_id);
    return it == instances_.end() ? nullptr : it->second;
}

std::shared_ptr<Instance> LifecycleManager::get(const std::string& instance_id) const {
    auto instance = find(instance_id);
    if (!instance) {
        throw Error(ErrorCode::UnknownInstance,
                    "no " + std::string(to_string(kind_)) + " instance '" + instance_id + "'");
    }
    return instance;
}

std::vector<std::shared_ptr<Instance>> LifecycleManager::instances() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::shared_ptr<Instance>> out;
    for (const auto& [id, instance] : instances_) out.push_back(instance);
    return out;
}

std::vector<InstanceRecord> LifecycleManager::list() const {
    std::vector<InstanceRecord> out;
    for (const auto& instance : instances()) out.push_back(instance->record());
    return out;
}

bool LifecycleManager::has_live_instances(const std::string& plugin_id) const {
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, instance] : instances_) {
        if (instance->plugin_id() == plugin_id && is_live(instance->state())) return true;
    }
    return false;
}

std::map<InstanceState, std::size_t> LifecycleManager::counts() const {
    std::map<InstanceState, std::size_t> out;
    for (const auto& instance : instances()) ++out[instance->state()];
    return out;
}

void LifecycleManager::shutdown() {
    std::lock_guard mutation(mutation_mutex_);
    for (const auto& instance : instances()) {
        executor_.detach(instance->id());
        if (is_live(instance->state())) instance->stop();
    }
}

}  // namespace reprobe
