// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/lifecycle/external.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "reprobe/core/codec.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

using nlohmann::json;

std::unique_ptr<PluginChannel> open_plugin_channel(const PluginDescriptor& descriptor,
                                                   const ExternalPluginOptions& options,
                                                   const std::string& instance_id,
                                                   const InstanceConfig& cfg) {
    const std::string log_name = descriptor.id + "/" + instance_id;
    try {
        auto channel = std::make_unique<PluginChannel>(
            std::vector<std::string>{options.executable.string()}, options.workdir, log_name);
        channel->request(json{{"op", "hello"}, {"schemaVersion", 1}}, options.handshake_timeout);
        channel->request(json{{"op", "configure"}, {"config", config_to_json(cfg)}},
                         options.handshake_timeout);
        return channel;
    } catch (const Error& e) {
        throw Error(ErrorCode::SpawnFailed,
                    "plugin '" + descriptor.id + "' failed to start: " + e.what());
    }
}

namespace {

void send_configure(PluginChannel& channel, const InstanceConfig& cfg, Duration timeout) {
    try {
        channel.request(json{{"op", "configure"}, {"config", config_to_json(cfg)}}, timeout);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("plugin rejected the configuration: ") + e.what());
    }
}

Sample sample_from_json(const json& j) {
    if (!j.is_object() || !j.contains("indicator") || !j["indicator"].is_string() ||
        !j.contains("value") || !j["value"].is_number()) {
        throw Error(ErrorCode::ProtocolError, "observation needs a string 'indicator' and a numeric 'value'");
    }
    Sample s;
    s.indicator = j["indicator"].get<std::string>();
    s.value = j["value"].get<double>();
    if (j.contains("unit") && j["unit"].is_string()) s.unit = j["unit"].get<std::string>();
    if (j.contains("labels") && j["labels"].is_object()) {
        for (const auto& [k, v] : j["labels"].items()) {
            if (!v.is_string()) throw Error(ErrorCode::ProtocolError, "label values must be strings");
            s.labels[k] = v.get<std::string>();
        }
    }
    return s;
}

}  // namespace

class ExternalCollectorBackend::RemoteSampler final : public Sampler {
  public:
    explicit RemoteSampler(ExternalCollectorBackend& owner) : owner_(owner) {}

    SampleResult sample(const TickContext& ctx) override {
        if (!owner_.channel_) throw Error(ErrorCode::SamplerFailure, "plugin process is not running");
        const auto deadline = ctx.period;
        json reply;
        try {
            reply = owner_.channel_->request(json{{"op", "sample"}, {"deadlineMs", deadline.count()}},
                                             deadline + owner_.options_.sample_grace);
        } catch (const Error& e) {
            throw Error(ErrorCode::SamplerFailure, e.what());
        }
        SampleResult out;
        if (reply.contains("observations")) {
            if (!reply["observations"].is_array()) {
                throw Error(ErrorCode::SamplerFailure, "'observations' must be an array");
            }
            for (const auto& o : reply["observations"]) out.samples.push_back(sample_from_json(o));
        }
        if (reply.contains("commands") && reply["commands"].is_array()) {
            for (const auto& c : reply["commands"]) {
                try {
                    out.commands.push_back(command_from_json(c, ctx.config.active_analyzer));
                } catch (const Error& e) {
                    spdlog::warn("collector '{}' ignored a malformed command: {}", ctx.instance_id,
                                 e.what());
                }
            }
        }
        return out;
    }

  private:
    ExternalCollectorBackend& owner_;
};

ExternalCollectorBackend::ExternalCollectorBackend(PluginDescriptor descriptor,
                                                   ExternalPluginOptions options,
                                                   std::string instance_id)
    : descriptor_(std::move(descriptor)),
      options_(std::move(options)),
      instance_id_(std::move(instance_id)),
      sampler_(std::make_unique<RemoteSampler>(*this)) {}

ExternalCollectorBackend::~ExternalCollectorBackend() { stop(); }

void ExternalCollectorBackend::start(const InstanceConfig& cfg) {
    channel_ = open_plugin_channel(descriptor_, options_, instance_id_, cfg);
}

void ExternalCollectorBackend::configure(const InstanceConfig& cfg) {
    if (!channel_) return;  // applied at start()
    send_configure(*channel_, cfg, options_.request_timeout);
}

void ExternalCollectorBackend::stop() {
    if (channel_) channel_->close(Duration(1000));
    channel_.reset();
}

Sampler* ExternalCollectorBackend::sampler(std::string_view id) {
    const auto& s = descriptor_.samplers;
    return std::find(s.begin(), s.end(), id) != s.end() ? sampler_.get() : nullptr;
}

Analyzer* ExternalCollectorBackend::analyzer(std::string_view id) {
    const auto& a = descriptor_.analyzers;
    return std::find(a.begin(), a.end(), id) != a.end() ? &analyzer_ : nullptr;
}

ExternalSink::ExternalSink(PluginDescriptor descriptor, ExternalPluginOptions options,
                           std::string instance_id)
    : descriptor_(std::move(descriptor)),
      options_(std::move(options)),
      instance_id_(std::move(instance_id)) {}

ExternalSink::~ExternalSink() { close(); }

void ExternalSink::start(const InstanceConfig& cfg) {
    channel_ = open_plugin_channel(descriptor_, options_, instance_id_, cfg);
}

void ExternalSink::configure(const InstanceConfig& cfg) {
    if (!channel_) return;
    send_configure(*channel_, cfg, options_.request_timeout);
}

void ExternalSink::publish(std::span<const Observation> batch) {
    if (!channel_) throw Error(ErrorCode::SinkUnavailable, "plugin process is not running");
    std::string line = R"({"op":"publish","batch":[)";
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (i > 0) line += ',';
        line += observation_to_json(batch[i]).dump();
    }
    line += "]}";
    try {
        channel_->request_line(line, "publish", options_.request_timeout);
    } catch (const Error& e) {
        throw Error(ErrorCode::SinkUnavailable, e.what());
    }
}

void ExternalSink::close() {
    if (channel_) channel_->close(Duration(1000));
    channel_.reset();
}

bool ExternalSink::alive() const { return channel_ && channel_->usable(); }

}  // namespace reprobe
