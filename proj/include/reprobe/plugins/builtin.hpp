// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "reprobe/collector/collector.hpp"
#include "reprobe/core/validate.hpp"
#include "reprobe/plugins/sinks.hpp"

namespace reprobe {

using CollectorFactory = std::function<std::unique_ptr<CollectorBackend>(
    const std::string& instance_id, const InstanceConfig&)>;
using SinkFactory =
    std::function<std::unique_ptr<Sink>(const std::string& instance_id, const InstanceConfig&)>;

/// A compiled-in plugin: its descriptor, cross-field checks and a factory.
struct BuiltinPlugin {
    PluginDescriptor descriptor;
    ExtraConfigCheck extra_check;
    CollectorFactory make_collector;  // collectors
    SinkFactory make_sink;            // publishers
};

inline constexpr const char* kSyntheticCollector = "synthetic-sampler";
inline constexpr const char* kSystemCollector = "system-sampler";
inline constexpr const char* kFileSink = "file-sink";
inline constexpr const char* kHttpSink = "http-sink";
inline constexpr const char* kCaptureSink = "capture-sink";

/// Params every publisher accepts: queue capacity and drain batch size.
std::vector<ParamSpec> publisher_common_params();

/// Params understood by the builtin analyzers (adaptive-rate, aggregator) and
/// the fingerprint option.
std::vector<ParamSpec> analyzer_params();

/// Rejects low >= high, min >= max, factor <= 1 and non-positive thresholds.
void check_analyzer_params(const InstanceConfig& cfg, std::vector<Violation>& out);

/// Adds the builtin analyzers to `set`.
void add_builtin_analyzers(BehaviorSet& set);

/// The builtin catalog. Capture sinks record into `captures`.
std::vector<BuiltinPlugin> builtin_plugins(std::shared_ptr<CaptureRegistry> captures);

}  // namespace reprobe
