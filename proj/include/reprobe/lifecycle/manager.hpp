// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "reprobe/bus/data_manager.hpp"
#include "reprobe/collector/executor.hpp"
#include "reprobe/lifecycle/instance.hpp"
#include "reprobe/lifecycle/registry.hpp"

namespace reprobe {

/// Collectors Manager or Publishers Manager, depending on `kind`. Mutations
/// are serialized; reads run concurrently.
class LifecycleManager {
  public:
    struct Options {
        PeriodBounds bounds;
        std::uint64_t failure_threshold = 5;
        Duration publisher_poll{20};
        Duration drain_deadline{2000};
    };

    LifecycleManager(PluginKind kind, PluginRegistry& registry, DataManager& bus, Executor& executor,
                     Options options);
    ~LifecycleManager();

    PluginKind kind() const { return kind_; }

    /// Validates, starts and schedules a new instance. An empty `instance_id`
    /// gets a generated one. Throws UnknownPlugin, InvalidConfig, InstanceExists
    /// or SpawnFailed (the record then stays, in state Failed).
    InstanceRecord instantiate(const InstanceConfig& cfg, std::string instance_id = {});
    /// Throws UnknownInstance or AlreadyTerminal.
    void destroy(const std::string& instance_id);
    /// Throws UnknownInstance, IllegalState or InvalidConfig.
    InstanceConfig reconfigure(const std::string& instance_id, const ConfigPatch& patch);

    /// Throws Error(UnknownInstance).
    std::shared_ptr<Instance> get(const std::string& instance_id) const;
    std::shared_ptr<Instance> find(const std::string& instance_id) const;
    std::vector<std::shared_ptr<Instance>> instances() const;
    std::vector<InstanceRecord> list() const;
    bool has_live_instances(const std::string& plugin_id) const;
    std::map<InstanceState, std::size_t> counts() const;

    /// Stops every live instance (agent shutdown).
    void shutdown();

    /// Held by the agent while it removes plugins, so no instantiate races the removal.
    std::unique_lock<std::mutex> lock_mutations() { return std::unique_lock(mutation_mutex_); }

  private:
    std::string next_id_locked();

    const PluginKind kind_;
    PluginRegistry& registry_;
    DataManager& bus_;
    Executor& executor_;
    const Options options_;

    std::mutex mutation_mutex_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Instance>> instances_;
    std::uint64_t generated_ = 0;
};

}  // namespace reprobe
