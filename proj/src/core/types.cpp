// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/core/types.hpp"

#include <cmath>

#include <fmt/format.h>

#include "reprobe/core/duration.hpp"

namespace reprobe {

std::string_view to_string(PluginKind kind) noexcept {
    return kind == PluginKind::Collector ? "collector" : "publisher";
}

std::string_view to_string(Provenance provenance) noexcept {
    return provenance == Provenance::Builtin ? "builtin" : "external";
}

std::optional<PluginKind> parse_plugin_kind(std::string_view text) noexcept {
    if (text == "collector") return PluginKind::Collector;
    if (text == "publisher") return PluginKind::Publisher;
    return std::nullopt;
}

std::vector<std::string> observation_problems(const Observation& obs) {
    std::vector<std::string> problems;
    if (to_unix_nanos(obs.timestamp) <= 0) problems.emplace_back("timestamp must be positive");
    if (obs.indicator.empty()) problems.emplace_back("indicator is empty");
    if (obs.topic.empty()) problems.emplace_back("topic is empty");
    if (!std::isfinite(obs.value)) problems.emplace_back("value is not finite");
    return problems;
}

std::string_view to_string(ParamType type) noexcept {
    switch (type) {
        case ParamType::String: return "string";
        case ParamType::Int: return "int";
        case ParamType::Real: return "real";
        case ParamType::Bool: return "bool";
        case ParamType::Duration: return "duration";
    }
    return "string";
}

std::optional<ParamType> parse_param_type(std::string_view text) noexcept {
    if (text == "string") return ParamType::String;
    if (text == "int") return ParamType::Int;
    if (text == "real") return ParamType::Real;
    if (text == "bool") return ParamType::Bool;
    if (text == "duration") return ParamType::Duration;
    return std::nullopt;
}

std::string scalar_to_string(const Scalar& value) {
    struct Visitor {
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return fmt::format("{}", v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(Duration v) const { return format_duration(v); }
    };
    return std::visit(Visitor{}, value);
}

const ParamSpec* PluginDescriptor::find_param(std::string_view name) const {
    for (const auto& p : params) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

bool ConfigPatch::empty() const {
    return !plugin_id && !target && !indicators && !sampling_period && !active_sampler &&
           !active_analyzer && params.empty() && !topics;
}

InstanceConfig apply_patch(InstanceConfig base, const ConfigPatch& patch) {
    if (patch.plugin_id) base.plugin_id = *patch.plugin_id;
    if (patch.target) base.target = *patch.target;
    if (patch.indicators) base.indicators = *patch.indicators;
    if (patch.sampling_period) base.sampling_period = *patch.sampling_period;
    if (patch.active_sampler) base.active_sampler = *patch.active_sampler;
    if (patch.active_analyzer) base.active_analyzer = *patch.active_analyzer;
    for (const auto& [key, value] : patch.params) {
        if (value) {
            base.params[key] = *value;
        } else {
            base.params.erase(key);
        }
    }
    if (patch.topics) base.topics = *patch.topics;
    return base;
}

std::string describe(const AdaptationCommand& command) {
    struct Visitor {
        std::string operator()(const SetSamplingPeriod& c) const {
            return "SetSamplingPeriod(" + format_duration(c.period) + ")";
        }
        std::string operator()(const SwitchSampler& c) const { return "SwitchSampler(" + c.id + ")"; }
        std::string operator()(const SwitchAnalyzer& c) const {
            return "SwitchAnalyzer(" + c.id + ")";
        }
        std::string operator()(const SetParam& c) const {
            return "SetParam(" + c.key + "=" + scalar_to_string(c.value) + ")";
        }
    };
    return std::visit(Visitor{}, command.action);
}

}  // namespace reprobe
