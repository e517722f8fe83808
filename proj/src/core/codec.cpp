// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/core/codec.hpp"

#include <set>

#include "reprobe/core/duration.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void decode_fail(const std::string& what) {
    throw Error(ErrorCode::DecodeError, "cannot decode observation: " + what);
}

const json& require(const json& j, const char* key, json::value_t type) {
    auto it = j.find(key);
    if (it == j.end()) decode_fail(std::string("missing key '") + key + "'");
    const bool number_ok = type == json::value_t::number_float && it->is_number();
    const bool integer_ok = type == json::value_t::number_integer && it->is_number_integer();
    if (!(it->type() == type || number_ok || integer_ok)) {
        decode_fail(std::string("key '") + key + "' has the wrong type");
    }
    return *it;
}

std::vector<std::string> string_list(const json& j, const std::string& field,
                                     std::vector<Violation>& violations) {
    std::vector<std::string> out;
    if (!j.is_array()) {
        violations.push_back({ErrorCode::TypeMismatch, field, "expected an array of strings"});
        return out;
    }
    for (const auto& item : j) {
        if (!item.is_string()) {
            violations.push_back({ErrorCode::TypeMismatch, field, "expected an array of strings"});
            return {};
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::map<std::string, std::string> string_map(const json& j, const std::string& field,
                                              std::vector<Violation>& violations) {
    std::map<std::string, std::string> out;
    if (!j.is_object()) {
        violations.push_back({ErrorCode::TypeMismatch, field, "expected an object of strings"});
        return out;
    }
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
            out[key] = value.dump();
        } else {
            violations.push_back(
                {ErrorCode::TypeMismatch, field + "." + key, "expected a string value"});
        }
    }
    return out;
}

std::optional<Duration> duration_from_json(const json& j) {
    if (j.is_number_integer()) return Duration(j.get<std::int64_t>());
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v != static_cast<double>(static_cast<std::int64_t>(v))) return std::nullopt;
        return Duration(static_cast<std::int64_t>(v));
    }
    if (j.is_string()) return parse_duration(j.get<std::string>());
    return std::nullopt;
}

}  // namespace

ordered_json observation_to_json(const Observation& obs) {
    ordered_json j = ordered_json::object();
    j["indicator"] = obs.indicator;
    j["target"] = obs.target;
    j["timestamp"] = to_unix_nanos(obs.timestamp);
    j["value"] = obs.value;
    j["unit"] = obs.unit;
    ordered_json labels = ordered_json::object();
    for (const auto& [k, v] : obs.labels) labels[k] = v;  // std::map iterates sorted
    j["labels"] = std::move(labels);
    j["topic"] = obs.topic;
    j["sourceInstance"] = obs.source_instance;
    return j;
}

std::string canonical_encode(const Observation& obs) {
    std::string line = observation_to_json(obs).dump();
    line.push_back('\n');
    return line;
}

std::string canonical_encode(std::span<const Observation> batch) {
    std::string out;
    for (const auto& obs : batch) out += canonical_encode(obs);
    return out;
}

Observation observation_from_json(const json& j) {
    if (!j.is_object()) decode_fail("not a JSON object");
    Observation obs;
    obs.indicator = require(j, "indicator", json::value_t::string).get<std::string>();
    obs.target = require(j, "target", json::value_t::string).get<std::string>();
    obs.timestamp =
        from_unix_nanos(require(j, "timestamp", json::value_t::number_integer).get<std::int64_t>());
    obs.value = require(j, "value", json::value_t::number_float).get<double>();
    obs.unit = require(j, "unit", json::value_t::string).get<std::string>();
    for (const auto& [k, v] : require(j, "labels", json::value_t::object).items()) {
        if (!v.is_string()) decode_fail("label '" + k + "' is not a string");
        obs.labels[k] = v.get<std::string>();
    }
    obs.topic = require(j, "topic", json::value_t::string).get<std::string>();
    obs.source_instance = require(j, "sourceInstance", json::value_t::string).get<std::string>();
    if (auto problems = observation_problems(obs); !problems.empty()) decode_fail(problems.front());
    return obs;
}

Observation canonical_decode(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        decode_fail(e.what());
    }
    return observation_from_json(j);
}

std::vector<Observation> decode_ndjson(std::string_view text) {
    std::vector<Observation> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty()) out.push_back(canonical_decode(line));
        pos = end + 1;
    }
    return out;
}

json scalar_to_json(const Scalar& value) {
    struct Visitor {
        json operator()(bool v) const { return v; }
        json operator()(std::int64_t v) const { return v; }
        json operator()(double v) const { return v; }
        json operator()(const std::string& v) const { return v; }
        json operator()(Duration v) const { return format_duration(v); }
    };
    return std::visit(Visitor{}, value);
}

std::optional<Scalar> scalar_from_json(const json& j) {
    if (j.is_boolean()) return Scalar(j.get<bool>());
    if (j.is_number_integer()) return Scalar(j.get<std::int64_t>());
    if (j.is_number_float()) return Scalar(j.get<double>());
    if (j.is_string()) return Scalar(j.get<std::string>());
    return std::nullopt;
}

json config_to_json(const InstanceConfig& cfg) {
    json params = json::object();
    for (const auto& [k, v] : cfg.params) params[k] = scalar_to_json(v);
    return json{
        {"pluginId", cfg.plugin_id},
        {"target", cfg.target},
        {"indicators", cfg.indicators},
        {"samplingPeriod", format_duration(cfg.sampling_period)},
        {"activeSampler", cfg.active_sampler},
        {"activeAnalyzer", cfg.active_analyzer},
        {"params", std::move(params)},
        {"topics", cfg.topics},
    };
}

namespace {

// Shared by full configs and patches: every present field is parsed into `patch`.
ConfigPatch parse_fields(const json& j, std::vector<Violation>& violations) {
    static const std::set<std::string> kKnown = {
        "id",     "pluginId",       "target",         "indicators", "samplingPeriod",
        "activeSampler", "activeAnalyzer", "params", "analyzerParams", "topics"};
    ConfigPatch patch;
    if (!j.is_object()) {
        violations.push_back({ErrorCode::BadRequest, "", "expected a JSON object"});
        return patch;
    }
    for (const auto& [key, value] : j.items()) {
        if (!kKnown.contains(key)) {
            violations.push_back({ErrorCode::UnknownParam, key, "unknown field"});
        }
    }
    if (auto it = j.find("pluginId"); it != j.end()) {
        if (it->is_string()) {
            patch.plugin_id = it->get<std::string>();
        } else {
            violations.push_back({ErrorCode::TypeMismatch, "pluginId", "expected a string"});
        }
    }
    if (auto it = j.find("target"); it != j.end()) patch.target = string_map(*it, "target", violations);
    if (auto it = j.find("indicators"); it != j.end()) {
        patch.indicators = string_list(*it, "indicators", violations);
    }
    if (auto it = j.find("samplingPeriod"); it != j.end()) {
        if (auto d = duration_from_json(*it)) {
            patch.sampling_period = *d;
        } else {
            violations.push_back(
                {ErrorCode::TypeMismatch, "samplingPeriod", "expected a duration such as \"500ms\""});
        }
    }
    for (const char* key : {"activeSampler", "activeAnalyzer"}) {
        auto it = j.find(key);
        if (it == j.end()) continue;
        if (!it->is_string()) {
            violations.push_back({ErrorCode::TypeMismatch, key, "expected a string"});
            continue;
        }
        (std::string_view(key) == "activeSampler" ? patch.active_sampler : patch.active_analyzer) =
            it->get<std::string>();
    }
    for (const char* key : {"params", "analyzerParams"}) {
        auto it = j.find(key);
        if (it == j.end()) continue;
        if (!it->is_object()) {
            violations.push_back({ErrorCode::TypeMismatch, key, "expected an object"});
            continue;
        }
        for (const auto& [name, value] : it->items()) {
            if (value.is_null()) {
                patch.params[name] = std::nullopt;
            } else if (auto s = scalar_from_json(value)) {
                patch.params[name] = *s;
            } else {
                violations.push_back({ErrorCode::TypeMismatch, "params." + name,
                                      "parameters must be scalars"});
            }
        }
    }
    if (auto it = j.find("topics"); it != j.end()) patch.topics = string_list(*it, "topics", violations);
    return patch;
}

}  // namespace

InstanceConfig config_from_json(const json& j) {
    std::vector<Violation> violations;
    ConfigPatch patch = parse_fields(j, violations);
    if (!violations.empty()) {
        throw Error(ErrorCode::InvalidConfig, "malformed instance config: " + format_violations(violations),
                    violations);
    }
    return apply_patch(InstanceConfig{}, patch);
}

ConfigPatch patch_from_json(const json& j) {
    std::vector<Violation> violations;
    ConfigPatch patch = parse_fields(j, violations);
    if (j.is_object() && j.contains("id")) {
        violations.push_back({ErrorCode::BadRequest, "id", "instance id cannot be patched"});
    }
    if (!violations.empty()) {
        throw Error(ErrorCode::InvalidConfig, "malformed config patch: " + format_violations(violations),
                    violations);
    }
    return patch;
}

json descriptor_to_json(const PluginDescriptor& desc) {
    json params = json::array();
    for (const auto& p : desc.params) {
        json spec = {{"name", p.name}, {"type", to_string(p.type)}, {"required", p.required}};
        if (p.default_value) spec["default"] = scalar_to_json(*p.default_value);
        if (p.min) spec["min"] = *p.min;
        if (p.max) spec["max"] = *p.max;
        if (!p.description.empty()) spec["description"] = p.description;
        params.push_back(std::move(spec));
    }
    json j = {
        {"id", desc.id},
        {"kind", to_string(desc.kind)},
        {"provenance", to_string(desc.provenance)},
        {"version", desc.version},
        {"paramSchema", std::move(params)},
    };
    if (desc.kind == PluginKind::Collector) {
        j["samplers"] = desc.samplers;
        j["analyzers"] = desc.analyzers;
        j["indicators"] = desc.indicators;
    }
    if (!desc.entry.empty()) j["entry"] = desc.entry;
    if (!desc.description.empty()) j["description"] = desc.description;
    return j;
}

PluginDescriptor descriptor_from_manifest(const json& m) {
    std::vector<Violation> v;
    PluginDescriptor desc;
    desc.provenance = Provenance::External;
    if (!m.is_object()) {
        throw Error(ErrorCode::SchemaInvalid, "manifest is not a JSON object");
    }
    auto string_field = [&](const char* key, bool required) -> std::string {
        auto it = m.find(key);
        if (it == m.end()) {
            if (required) v.push_back({ErrorCode::SchemaInvalid, key, "missing"});
            return {};
        }
        if (!it->is_string()) {
            v.push_back({ErrorCode::SchemaInvalid, key, "expected a string"});
            return {};
        }
        return it->get<std::string>();
    };
    desc.id = string_field("id", true);
    if (m.contains("id") && desc.id.empty()) v.push_back({ErrorCode::SchemaInvalid, "id", "empty"});
    const std::string kind = string_field("kind", true);
    if (auto k = parse_plugin_kind(kind)) {
        desc.kind = *k;
    } else if (m.contains("kind")) {
        v.push_back({ErrorCode::SchemaInvalid, "kind", "must be collector or publisher"});
    }
    desc.version = string_field("version", true);
    desc.entry = string_field("entry", true);
    if (m.contains("entry") && desc.entry.empty()) {
        v.push_back({ErrorCode::SchemaInvalid, "entry", "external plugins need an entry"});
    }
    desc.description = string_field("description", false);

    auto list_field = [&](const char* key) -> std::vector<std::string> {
        auto it = m.find(key);
        if (it == m.end()) return {};
        std::vector<Violation> local;
        auto out = string_list(*it, key, local);
        for (auto& l : local) v.push_back({ErrorCode::SchemaInvalid, l.field, l.message});
        return out;
    };
    desc.samplers = list_field("samplers");
    desc.analyzers = list_field("analyzers");
    desc.indicators = list_field("indicators");
    if (desc.kind == PluginKind::Collector) {
        if (desc.samplers.empty()) {
            v.push_back({ErrorCode::SchemaInvalid, "samplers", "collectors declare at least one sampler"});
        }
        if (desc.analyzers.empty()) {
            v.push_back(
                {ErrorCode::SchemaInvalid, "analyzers", "collectors declare at least one analyzer"});
        }
    }

    std::set<std::string> names;
    if (auto it = m.find("paramSchema"); it != m.end()) {
        if (!it->is_array()) {
            v.push_back({ErrorCode::SchemaInvalid, "paramSchema", "expected an array"});
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const json& e = (*it)[i];
                const std::string field = "paramSchema[" + std::to_string(i) + "]";
                if (!e.is_object() || !e.contains("name") || !e["name"].is_string() ||
                    !e.contains("type") || !e["type"].is_string()) {
                    v.push_back({ErrorCode::SchemaInvalid, field, "needs string name and type"});
                    continue;
                }
                ParamSpec spec;
                spec.name = e["name"].get<std::string>();
                auto type = parse_param_type(e["type"].get<std::string>());
                if (!type) {
                    v.push_back({ErrorCode::SchemaInvalid, field + ".type", "unknown type"});
                    continue;
                }
                spec.type = *type;
                spec.required = e.value("required", false);
                if (auto d = e.find("default"); d != e.end() && !d->is_null()) {
                    spec.default_value = scalar_from_json(*d);
                    if (spec.type == ParamType::Duration && spec.default_value) {
                        if (auto dur = duration_from_json(*d)) {
                            spec.default_value = *dur;
                        } else {
                            v.push_back({ErrorCode::SchemaInvalid, field + ".default",
                                         "default is not a duration"});
                        }
                    }
                }
                if (auto lo = e.find("min"); lo != e.end() && lo->is_number()) spec.min = lo->get<double>();
                if (auto hi = e.find("max"); hi != e.end() && hi->is_number()) spec.max = hi->get<double>();
                spec.description = e.value("description", "");
                if (spec.name.empty()) {
                    v.push_back({ErrorCode::SchemaInvalid, field + ".name", "empty"});
                } else if (!names.insert(spec.name).second) {
                    v.push_back({ErrorCode::SchemaInvalid, field + ".name",
                                 "duplicate parameter '" + spec.name + "'"});
                }
                desc.params.push_back(std::move(spec));
            }
        }
    }
    if (!v.empty()) {
        throw Error(ErrorCode::SchemaInvalid, "invalid plugin manifest: " + format_violations(v), v);
    }
    return desc;
}

json command_to_json(const AdaptationCommand& command) {
    struct Visitor {
        json operator()(const SetSamplingPeriod& c) const {
            return {{"command", "setSamplingPeriod"}, {"value", format_duration(c.period)}};
        }
        json operator()(const SwitchSampler& c) const {
            return {{"command", "switchSampler"}, {"id", c.id}};
        }
        json operator()(const SwitchAnalyzer& c) const {
            return {{"command", "switchAnalyzer"}, {"id", c.id}};
        }
        json operator()(const SetParam& c) const {
            return {{"command", "setParam"}, {"key", c.key}, {"value", scalar_to_json(c.value)}};
        }
    };
    json j = std::visit(Visitor{}, command.action);
    j["issuedBy"] = command.issued_by;
    j["reason"] = command.reason;
    return j;
}

AdaptationCommand command_from_json(const json& j, std::string_view issued_by) {
    auto fail = [](const std::string& what) -> AdaptationCommand {
        throw Error(ErrorCode::ProtocolError, "malformed adaptation command: " + what);
    };
    if (!j.is_object() || !j.contains("command") || !j["command"].is_string()) {
        return fail("missing 'command'");
    }
    AdaptationCommand cmd;
    cmd.issued_by = std::string(issued_by);
    if (auto r = j.find("reason"); r != j.end() && r->is_string()) cmd.reason = r->get<std::string>();
    const auto name = j["command"].get<std::string>();
    if (name == "setSamplingPeriod") {
        auto d = j.contains("value") ? duration_from_json(j["value"]) : std::nullopt;
        if (!d) return fail("setSamplingPeriod needs a duration value");
        cmd.action = SetSamplingPeriod{*d};
    } else if (name == "switchSampler" || name == "switchAnalyzer") {
        if (!j.contains("id") || !j["id"].is_string()) return fail(name + " needs a string id");
        if (name == "switchSampler") {
            cmd.action = SwitchSampler{j["id"].get<std::string>()};
        } else {
            cmd.action = SwitchAnalyzer{j["id"].get<std::string>()};
        }
    } else if (name == "setParam") {
        if (!j.contains("key") || !j["key"].is_string() || !j.contains("value")) {
            return fail("setParam needs key and value");
        }
        auto s = scalar_from_json(j["value"]);
        if (!s) return fail("setParam value must be a scalar");
        cmd.action = SetParam{j["key"].get<std::string>(), *s};
    } else {
        return fail("unknown command '" + name + "'");
    }
    return cmd;
}

}  // namespace reprobe
