// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reprobe {

using Duration = std::chrono::milliseconds;
using TimePoint = std::chrono::time_point<std::chrono::system_clock, std::chrono::nanoseconds>;
using Labels = std::map<std::string, std::string>;

inline std::int64_t to_unix_nanos(TimePoint t) { return t.time_since_epoch().count(); }
inline TimePoint from_unix_nanos(std::int64_t ns) {
    return TimePoint(std::chrono::nanoseconds(ns));
}

enum class PluginKind { Collector, Publisher };
enum class Provenance { Builtin, External };

std::string_view to_string(PluginKind kind) noexcept;
std::string_view to_string(Provenance provenance) noexcept;
std::optional<PluginKind> parse_plugin_kind(std::string_view text) noexcept;

/// One sampled indicator value.
struct Observation {
    std::string indicator;
    std::string target;
    TimePoint timestamp{};
    double value = 0.0;
    std::string unit;
    Labels labels;
    std::string topic;
    std::string source_instance;

    bool operator==(const Observation&) const = default;
};

/// Empty when the observation satisfies its invariants.
std::vector<std::string> observation_problems(const Observation& obs);

enum class ParamType { String, Int, Real, Bool, Duration };

std::string_view to_string(ParamType type) noexcept;
std::optional<ParamType> parse_param_type(std::string_view text) noexcept;

using Scalar = std::variant<bool, std::int64_t, double, std::string, Duration>;

std::string scalar_to_string(const Scalar& value);

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::String;
    bool required = false;
    std::optional<Scalar> default_value;
    std::optional<double> min;  // inclusive; durations compare in milliseconds
    std::optional<double> max;
    std::string description;

    bool operator==(const ParamSpec&) const = default;
};

struct PluginDescriptor {
    std::string id;
    PluginKind kind = PluginKind::Collector;
    Provenance provenance = Provenance::Builtin;
    std::string version;
    std::vector<ParamSpec> params;
    std::vector<std::string> samplers;    // collectors only
    std::vector<std::string> analyzers;   // collectors only
    std::vector<std::string> indicators;  // empty: any indicator name accepted
    std::string entry;                    // external plugins: executable path inside the bundle
    std::string description;

    const ParamSpec* find_param(std::string_view name) const;
    bool operator==(const PluginDescriptor&) const = default;
};

struct PeriodBounds {
    Duration min{10};
    Duration max{3'600'000};

    bool operator==(const PeriodBounds&) const = default;
};

/// Configuration of one plugin instance. Publishers use `topics` as a topic
/// filter and ignore the sampling fields.
struct InstanceConfig {
    std::string plugin_id;
    std::map<std::string, std::string> target;
    std::vector<std::string> indicators;
    Duration sampling_period{1000};
    std::string active_sampler;
    std::string active_analyzer;
    std::map<std::string, Scalar> params;
    std::vector<std::string> topics;

    bool operator==(const InstanceConfig&) const = default;

    template <typename T>
    std::optional<T> param(std::string_view key) const {
        auto it = params.find(std::string(key));
        if (it == params.end()) return std::nullopt;
        if (const T* v = std::get_if<T>(&it->second)) return *v;
        return std::nullopt;
    }
};

/// Partial InstanceConfig: absent fields are left unchanged. A param mapped to
/// nullopt is removed (and so falls back to its schema default).
struct ConfigPatch {
    std::optional<std::string> plugin_id;
    std::optional<std::map<std::string, std::string>> target;
    std::optional<std::vector<std::string>> indicators;
    std::optional<Duration> sampling_period;
    std::optional<std::string> active_sampler;
    std::optional<std::string> active_analyzer;
    std::map<std::string, std::optional<Scalar>> params;
    std::optional<std::vector<std::string>> topics;

    bool empty() const;
};

InstanceConfig apply_patch(InstanceConfig base, const ConfigPatch& patch);

struct SetSamplingPeriod {
    Duration period;
    bool operator==(const SetSamplingPeriod&) const = default;
};
struct SwitchSampler {
    std::string id;
    bool operator==(const SwitchSampler&) const = default;
};
struct SwitchAnalyzer {
    std::string id;
    bool operator==(const SwitchAnalyzer&) const = default;
};
struct SetParam {
    std::string key;
    Scalar value;
    bool operator==(const SetParam&) const = default;
};

/// A request from a Data Analyzer to the collector's Controller.
struct AdaptationCommand {
    std::variant<SetSamplingPeriod, SwitchSampler, SwitchAnalyzer, SetParam> action;
    std::string issued_by;
    std::string reason;

    bool operator==(const AdaptationCommand&) const = default;
};

std::string describe(const AdaptationCommand& command);

}  // namespace reprobe
