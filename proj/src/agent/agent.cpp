// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/agent/agent.hpp"

#include <unistd.h>

#include <atomic>

#include <spdlog/spdlog.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

namespace {

std::filesystem::path fresh_plugin_dir() {
    static std::atomic<std::uint64_t> counter{0};
    return std::filesystem::temp_directory_path() /
           ("reprobe-plugins-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
}

}  // namespace

Agent::Agent(AgentOptions options)
    : options_(std::move(options)), captures_(std::make_shared<CaptureRegistry>()) {
    if (options_.plugin_dir.empty()) {
        plugin_dir_ = fresh_plugin_dir();
        owns_plugin_dir_ = true;
    } else {
        plugin_dir_ = options_.plugin_dir;
    }
    std::filesystem::create_directories(plugin_dir_);

    if (options_.mode == TimeMode::Virtual) {
        auto exec = std::make_unique<VirtualExecutor>();
        virtual_ = exec.get();
        executor_ = std::move(exec);
    } else {
        executor_ = std::make_unique<ThreadExecutor>();
    }

    registry_ = std::make_unique<PluginRegistry>(plugin_dir_, options_.handshake_timeout);
    registry_->add_builtins(builtin_plugins(captures_));

    LifecycleManager::Options mo;
    mo.bounds = options_.bounds;
    mo.failure_threshold = options_.failure_threshold;
    mo.publisher_poll = options_.publisher_poll;
    mo.drain_deadline = options_.drain_deadline;
    collectors_ = std::make_unique<LifecycleManager>(PluginKind::Collector, *registry_, bus_, *executor_, mo);
    publishers_ = std::make_unique<LifecycleManager>(PluginKind::Publisher, *registry_, bus_, *executor_, mo);

    started_at_ = executor_->clock().now();
    started_steady_ = std::chrono::steady_clock::now();
    incarnation_ = std::to_string(::getpid()) + "-" + std::to_string(to_unix_nanos(SystemClock().now()));
}

Agent::~Agent() {
    shutdown();
    publishers_.reset();
    collectors_.reset();
    registry_.reset();
    executor_.reset();
    if (owns_plugin_dir_) {
        std::error_code ec;
        std::filesystem::remove_all(plugin_dir_, ec);
    }
}

void Agent::shutdown() {
    // Collectors first so publishers can drain everything already emitted.
    if (collectors_) collectors_->shutdown();
    if (publishers_) publishers_->shutdown();
}

PluginRegistry::UploadResult Agent::upload_plugin(std::string_view bundle) {
    return registry_->upload(bundle);
}

void Agent::remove_plugin(const std::string& id) {
    auto entry = registry_->get(id);
    if (entry->descriptor.provenance == Provenance::Builtin) {
        throw Error(ErrorCode::BuiltinImmutable, "builtin plugin '" + id + "' cannot be removed");
    }
    // Hold both mutation paths so no instantiate slips in between check and removal.
    auto col_lock = collectors_->lock_mutations();
    auto pub_lock = publishers_->lock_mutations();
    if (collectors_->has_live_instances(id) || publishers_->has_live_instances(id)) {
        throw Error(ErrorCode::PluginInUse, "plugin '" + id + "' still has live instances");
    }
    registry_->remove(id);
    spdlog::info("removed plugin '{}'", id);
}

Duration Agent::uptime() const {
    if (options_.mode == TimeMode::Virtual) {
        return std::chrono::duration_cast<Duration>(executor_->clock().now() - started_at_);
    }
    return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - started_steady_);
}

}  // namespace reprobe
