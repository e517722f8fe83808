// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/core/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "reprobe/core/duration.hpp"

namespace reprobe {

bool valid_filter_pattern(std::string_view pattern) {
    if (pattern.empty()) return false;
    const auto star = pattern.find('*');
    return star == std::string_view::npos || star == pattern.size() - 1;
}

std::optional<Scalar> coerce_scalar(const Scalar& value, ParamType type) {
    switch (type) {
        case ParamType::String:
            if (std::holds_alternative<std::string>(value)) return value;
            return std::nullopt;
        case ParamType::Bool:
            if (std::holds_alternative<bool>(value)) return value;
            return std::nullopt;
        case ParamType::Int:
            if (std::holds_alternative<std::int64_t>(value)) return value;
            if (const double* d = std::get_if<double>(&value)) {
                if (std::isfinite(*d) && std::trunc(*d) == *d && std::abs(*d) < 9.0e18) {
                    return Scalar(static_cast<std::int64_t>(*d));
                }
            }
            return std::nullopt;
        case ParamType::Real:
            if (const double* d = std::get_if<double>(&value)) {
                if (std::isfinite(*d)) return value;
                return std::nullopt;
            }
            if (const auto* i = std::get_if<std::int64_t>(&value)) {
                return Scalar(static_cast<double>(*i));
            }
            return std::nullopt;
        case ParamType::Duration:
            if (std::holds_alternative<Duration>(value)) return value;
            if (const auto* i = std::get_if<std::int64_t>(&value)) return Scalar(Duration(*i));
            if (const auto* s = std::get_if<std::string>(&value)) {
                if (auto d = parse_duration(*s)) return Scalar(*d);
            }
            return std::nullopt;
    }
    return std::nullopt;
}

namespace {

double numeric_of(const Scalar& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&value)) return *d;
    if (const auto* ms = std::get_if<Duration>(&value)) return static_cast<double>(ms->count());
    return 0.0;
}

void check_params(const InstanceConfig& cfg, const PluginDescriptor& desc,
                  std::map<std::string, Scalar>& out, std::vector<Violation>& v) {
    for (const auto& [name, value] : cfg.params) {
        const ParamSpec* spec = desc.find_param(name);
        if (spec == nullptr) {
            v.push_back({ErrorCode::UnknownParam, "params." + name,
                         "plugin '" + desc.id + "' declares no parameter '" + name + "'"});
            continue;
        }
        auto coerced = coerce_scalar(value, spec->type);
        if (!coerced) {
            v.push_back({ErrorCode::TypeMismatch, "params." + name,
                         fmt::format("expected {}, got '{}'", to_string(spec->type),
                                     scalar_to_string(value))});
            continue;
        }
        if (spec->type == ParamType::Int || spec->type == ParamType::Real ||
            spec->type == ParamType::Duration) {
            const double n = numeric_of(*coerced);
            if ((spec->min && n < *spec->min) || (spec->max && n > *spec->max)) {
                v.push_back({ErrorCode::ConstraintViolated, "params." + name,
                             fmt::format("{} is outside [{}, {}]", scalar_to_string(*coerced),
                                         spec->min ? fmt::format("{}", *spec->min) : "-inf",
                                         spec->max ? fmt::format("{}", *spec->max) : "+inf")});
                continue;
            }
        }
        out[name] = *coerced;
    }
    for (const auto& spec : desc.params) {
        if (cfg.params.contains(spec.name)) continue;
        if (spec.default_value) {
            if (auto coerced = coerce_scalar(*spec.default_value, spec.type)) {
                out[spec.name] = *coerced;
            }
        } else if (spec.required) {
            v.push_back({ErrorCode::MissingRequiredParam, "params." + spec.name,
                         "required parameter is missing"});
        }
    }
}

bool contains(const std::vector<std::string>& list, const std::string& item) {
    return std::find(list.begin(), list.end(), item) != list.end();
}

}  // namespace

ValidationResult validate_instance_config(const InstanceConfig& cfg, const PluginDescriptor& desc,
                                          PluginKind expected_kind, const PeriodBounds& bounds,
                                          const ExtraConfigCheck& extra) {
    std::vector<Violation> v;
    InstanceConfig out = cfg;

    if (!cfg.plugin_id.empty() && cfg.plugin_id != desc.id) {
        v.push_back({ErrorCode::InvalidConfig, "pluginId",
                     "config names plugin '" + cfg.plugin_id + "' but is checked against '" +
                         desc.id + "'"});
    }
    out.plugin_id = desc.id;
    if (desc.kind != expected_kind) {
        v.push_back({ErrorCode::InvalidConfig, "pluginId",
                     fmt::format("plugin '{}' is a {}, not a {}", desc.id, to_string(desc.kind),
                                 to_string(expected_kind))});
    }

    out.params.clear();
    check_params(cfg, desc, out.params, v);

    if (expected_kind == PluginKind::Collector) {
        if (cfg.indicators.empty()) {
            v.push_back({ErrorCode::EmptyIndicators, "indicators", "at least one indicator is required"});
        }
        std::set<std::string> seen;
        for (const auto& name : cfg.indicators) {
            if (name.empty()) {
                v.push_back({ErrorCode::UnsupportedIndicator, "indicators", "empty indicator name"});
            } else if (!seen.insert(name).second) {
                v.push_back({ErrorCode::DuplicateIndicator, "indicators", "'" + name + "' listed twice"});
            } else if (!desc.indicators.empty() && !contains(desc.indicators, name)) {
                v.push_back({ErrorCode::UnsupportedIndicator, "indicators",
                             "plugin '" + desc.id + "' cannot sample '" + name + "'"});
            }
        }
        if (cfg.sampling_period < bounds.min || cfg.sampling_period > bounds.max) {
            v.push_back({ErrorCode::PeriodOutOfRange, "samplingPeriod",
                         fmt::format("{} is outside [{}, {}]", format_duration(cfg.sampling_period),
                                     format_duration(bounds.min), format_duration(bounds.max))});
        }
        if (out.active_sampler.empty() && !desc.samplers.empty()) {
            out.active_sampler = desc.samplers.front();
        }
        if (!contains(desc.samplers, out.active_sampler)) {
            v.push_back({ErrorCode::UnknownSampler, "activeSampler",
                         "plugin '" + desc.id + "' has no sampler '" + out.active_sampler + "'"});
        }
        if (out.active_analyzer.empty() && !desc.analyzers.empty()) {
            out.active_analyzer = desc.analyzers.front();
        }
        if (!contains(desc.analyzers, out.active_analyzer)) {
            v.push_back({ErrorCode::UnknownAnalyzer, "activeAnalyzer",
                         "plugin '" + desc.id + "' has no analyzer '" + out.active_analyzer + "'"});
        }
        if (out.topics.empty()) out.topics = {desc.id};
        if (out.topics.size() != 1) {
            v.push_back({ErrorCode::InvalidTopic, "topics", "a collector tags its output with exactly one topic"});
        } else if (out.topics.front().empty() ||
                   out.topics.front().find('*') != std::string::npos) {
            v.push_back({ErrorCode::InvalidTopic, "topics",
                         "collector topic must be nonempty and contain no '*'"});
        }
    } else {
        if (out.topics.empty()) out.topics = {"*"};
        for (const auto& pattern : out.topics) {
            if (!valid_filter_pattern(pattern)) {
                v.push_back({ErrorCode::InvalidTopic, "topics",
                             "filter entry '" + pattern + "' must be nonempty with '*' only at the end"});
            }
        }
    }

    if (v.empty() && extra) extra(out, v);

    if (!v.empty()) return ValidationResult{std::nullopt, std::move(v)};
    return ValidationResult{std::move(out), {}};
}

InstanceConfig validate_or_throw(const InstanceConfig& cfg, const PluginDescriptor& desc,
                                 PluginKind expected_kind, const PeriodBounds& bounds,
                                 const ExtraConfigCheck& extra) {
    auto result = validate_instance_config(cfg, desc, expected_kind, bounds, extra);
    if (!result.ok()) {
        throw Error(ErrorCode::InvalidConfig,
                    "invalid configuration: " + format_violations(result.violations),
                    std::move(result.violations));
    }
    return std::move(*result.config);
}

}  // namespace reprobe
