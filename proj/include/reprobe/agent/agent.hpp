// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "reprobe/bus/data_manager.hpp"
#include "reprobe/collector/executor.hpp"
#include "reprobe/lifecycle/manager.hpp"
#include "reprobe/lifecycle/registry.hpp"

namespace reprobe {

inline constexpr const char* kAgentVersion = "1.0.0";

enum class TimeMode { Wall, Virtual };

struct AgentOptions {
    TimeMode mode = TimeMode::Wall;
    PeriodBounds bounds;
    /// Where uploaded bundles are unpacked; empty picks a fresh temp directory.
    std::filesystem::path plugin_dir;
    Duration handshake_timeout{5000};
    Duration publisher_poll{20};
    Duration drain_deadline{2000};
    std::uint64_t failure_threshold = 5;
};

/// The probe: plugin registry, Data Manager, both lifecycle managers and the
/// executor that drives instances.
class Agent {
  public:
    explicit Agent(AgentOptions options = {});
    ~Agent();
    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    PluginRegistry& registry() { return *registry_; }
    DataManager& bus() { return bus_; }
    CaptureRegistry& captures() { return *captures_; }
    LifecycleManager& collectors() { return *collectors_; }
    LifecycleManager& publishers() { return *publishers_; }
    LifecycleManager& manager(PluginKind kind) {
        return kind == PluginKind::Collector ? *collectors_ : *publishers_;
    }
    Executor& executor() { return *executor_; }
    /// Null in wall mode.
    VirtualExecutor* virtual_executor() { return virtual_; }
    const Clock& clock() const { return executor_->clock(); }
    const AgentOptions& options() const { return options_; }

    PluginRegistry::UploadResult upload_plugin(std::string_view bundle);
    /// Throws UnknownPlugin, BuiltinImmutable or PluginInUse.
    void remove_plugin(const std::string& id);

    TimePoint started_at() const { return started_at_; }
    /// Wall mode: monotonic time since construction. Virtual mode: virtual time.
    Duration uptime() const;
    /// Distinguishes agent processes/incarnations in reports.
    const std::string& incarnation() const { return incarnation_; }

    void shutdown();

  private:
    AgentOptions options_;
    std::filesystem::path plugin_dir_;
    bool owns_plugin_dir_ = false;
    DataManager bus_;
    std::shared_ptr<CaptureRegistry> captures_;
    std::unique_ptr<Executor> executor_;
    VirtualExecutor* virtual_ = nullptr;
    std::unique_ptr<PluginRegistry> registry_;
    std::unique_ptr<LifecycleManager> collectors_;
    std::unique_ptr<LifecycleManager> publishers_;
    TimePoint started_at_;
    std::chrono::steady_clock::time_point started_steady_;
    std::string incarnation_;
};

}  // namespace reprobe
