// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "reprobe/collector/collector.hpp"
#include "reprobe/lifecycle/subprocess.hpp"
#include "reprobe/plugins/analyzers.hpp"
#include "reprobe/plugins/sinks.hpp"

namespace reprobe {

struct ExternalPluginOptions {
    std::filesystem::path executable;
    std::filesystem::path workdir;
    Duration handshake_timeout{5000};
    Duration request_timeout{2000};  // configure / publish
    Duration sample_grace{1000};     // added to deadlineMs when waiting for a sample reply
};

/// A collector whose sampler and analyzer run in a subprocess. The analyzer
/// logic lives out of process: commands arrive with the sample reply, and the
/// in-process analyzer passes data through.
class ExternalCollectorBackend final : public CollectorBackend {
  public:
    ExternalCollectorBackend(PluginDescriptor descriptor, ExternalPluginOptions options,
                             std::string instance_id);
    ~ExternalCollectorBackend() override;

    void start(const InstanceConfig& cfg) override;
    void configure(const InstanceConfig& cfg) override;
    void stop() override;
    Sampler* sampler(std::string_view id) override;
    Analyzer* analyzer(std::string_view id) override;

  private:
    class RemoteSampler;
    PluginDescriptor descriptor_;
    ExternalPluginOptions options_;
    std::string instance_id_;
    std::unique_ptr<PluginChannel> channel_;
    std::unique_ptr<RemoteSampler> sampler_;
    PassthroughAnalyzer analyzer_;
};

/// A publisher sink living in a subprocess.
class ExternalSink final : public Sink {
  public:
    ExternalSink(PluginDescriptor descriptor, ExternalPluginOptions options, std::string instance_id);
    ~ExternalSink() override;

    void start(const InstanceConfig& cfg) override;
    void configure(const InstanceConfig& cfg) override;
    void publish(std::span<const Observation> batch) override;
    void close() override;
    bool alive() const override;

  private:
    PluginDescriptor descriptor_;
    ExternalPluginOptions options_;
    std::string instance_id_;
    std::unique_ptr<PluginChannel> channel_;
};

/// Spawns the plugin and performs the hello + configure handshake.
/// Throws Error(SpawnFailed).
std::unique_ptr<PluginChannel> open_plugin_channel(const PluginDescriptor& descriptor,
                                                   const ExternalPluginOptions& options,
                                                   const std::string& instance_id,
                                                   const InstanceConfig& cfg);

}  // namespace reprobe
