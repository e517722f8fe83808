// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/api/json_views.hpp"

#include <ctime>

#include <fmt/format.h>

#include "reprobe/core/codec.hpp"
#include "reprobe/core/duration.hpp"

namespace reprobe {

using nlohmann::json;

std::string format_timestamp(TimePoint t) {
    const std::int64_t ns = to_unix_nanos(t);
    const std::time_t secs = static_cast<std::time_t>(ns / 1'000'000'000);
    const int ms = static_cast<int>((ns / 1'000'000) % 1000);
    std::tm tm{};
    ::gmtime_r(&secs, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                       tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

int http_status_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownPlugin:
        case ErrorCode::UnknownInstance:
        case ErrorCode::NotFound:
            return 404;
        case ErrorCode::RegisterConflict:
        case ErrorCode::PluginInUse:
        case ErrorCode::IllegalState:
        case ErrorCode::AlreadyTerminal:
        case ErrorCode::InstanceExists:
            return 409;
        case ErrorCode::BuiltinImmutable:
            return 403;
        case ErrorCode::MalformedBundle:
        case ErrorCode::SchemaInvalid:
        case ErrorCode::InvalidConfig:
        case ErrorCode::UnknownParam:
        case ErrorCode::MissingRequiredParam:
        case ErrorCode::TypeMismatch:
        case ErrorCode::PeriodOutOfRange:
        case ErrorCode::EmptyIndicators:
        case ErrorCode::DuplicateIndicator:
        case ErrorCode::UnsupportedIndicator:
        case ErrorCode::UnknownSampler:
        case ErrorCode::UnknownAnalyzer:
        case ErrorCode::InvalidTopic:
        case ErrorCode::ConstraintViolated:
        case ErrorCode::InvalidCommand:
            return 422;
        case ErrorCode::BadRequest:
        case ErrorCode::DecodeError:
            return 400;
        case ErrorCode::Unauthorized:
            return 401;
        case ErrorCode::MethodNotAllowed:
            return 405;
        case ErrorCode::SpawnFailed:
            return 502;
        default:
            return 500;
    }
}

json error_to_json(ErrorCode code, const std::string& message, const std::vector<Violation>& details) {
    json j{{"code", to_string(code)}, {"message", message}};
    json list = json::array();
    for (const auto& v : details) {
        list.push_back({{"code", to_string(v.code)}, {"field", v.field}, {"message", v.message}});
    }
    j["details"] = std::move(list);
    return j;
}

json record_to_json(const InstanceRecord& record) {
    json j{{"id", record.instance_id},
           {"pluginId", record.plugin_id},
           {"kind", to_string(record.kind)},
           {"state", to_string(record.state)},
           {"config", config_to_json(record.config)},
           {"startedAt", format_timestamp(record.started_at)}};
    j["lastError"] = record.last_error ? json(*record.last_error) : json(nullptr);
    return j;
}

json audit_to_json(const AuditEntry& e) {
    json j{{"tick", e.tick},
           {"at", format_timestamp(e.at)},
           {"source", to_string(e.source)},
           {"change", e.change},
           {"issuedBy", e.issued_by},
           {"reason", e.reason},
           {"applied", e.applied},
           {"periodBefore", format_duration(e.period_before)},
           {"periodAfter", format_duration(e.period_after)},
           {"selfReplacement", e.self_replacement}};
    if (!e.error.empty()) j["error"] = e.error;
    return j;
}

namespace {

json collector_details(const CollectorInstance& c) {
    const auto& runtime = c.runtime();
    const auto stats = runtime.stats();
    json audit = json::array();
    for (const auto& e : runtime.audit()) audit.push_back(audit_to_json(e));
    json s{{"ticks", stats.ticks},
           {"emitted", stats.emitted},
           {"failures", stats.failures},
           {"consecutiveFailures", stats.consecutive_failures},
           {"discarded", stats.discarded},
           {"commandsApplied", stats.commands_applied},
           {"commandsRejected", stats.commands_rejected},
           {"samplerCalls", stats.sampler_calls},
           {"analyzerCalls", stats.analyzer_calls},
           {"maxSamplersPerTick", stats.max_samplers_per_tick},
           {"maxAnalyzersPerTick", stats.max_analyzers_per_tick}};
    return json{{"effectivePeriod", format_duration(runtime.effective_period())},
                {"audit", std::move(audit)},
                {"stats", std::move(s)}};
}

json publisher_details(const PublisherInstance& p, DataManager& bus) {
    const auto stats = p.stats();
    json j{{"stats",
            {{"batches", stats.batches},
             {"delivered", stats.delivered},
             {"failedBatches", stats.failed_batches},
             {"lost", stats.lost},
             {"abandoned", stats.abandoned},
             {"retries", stats.sink.retries}}}};
    const auto subs = bus.stats();
    if (auto it = subs.find(p.id()); it != subs.end()) {
        const auto& s = it->second;
        j["subscription"] = {{"filter", s.filter},     {"capacity", s.capacity}, {"depth", s.depth},
                             {"enqueued", s.enqueued}, {"drained", s.drained},   {"dropped", s.dropped}};
    } else {
        j["subscription"] = nullptr;
    }
    return j;
}

}  // namespace

json instance_details(const Instance& instance, DataManager& bus) {
    json j = record_to_json(instance.record());
    json history = json::array();
    for (const auto& h : instance.history()) {
        history.push_back({{"from", to_string(h.from)}, {"to", to_string(h.to)}, {"at", format_timestamp(h.at)}});
    }
    j["history"] = std::move(history);
    json extra;
    if (const auto* c = dynamic_cast<const CollectorInstance*>(&instance)) {
        extra = collector_details(*c);
    } else if (const auto* p = dynamic_cast<const PublisherInstance*>(&instance)) {
        extra = publisher_details(*p, bus);
    }
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

json status_to_json(Agent& agent) {
    const auto plugins = agent.registry().list();
    std::size_t builtin = 0, collectors = 0;
    for (const auto& d : plugins) {
        if (d.provenance == Provenance::Builtin) ++builtin;
        if (d.kind == PluginKind::Collector) ++collectors;
    }
    auto counts = [](const LifecycleManager& m) {
        json j{{"Created", 0}, {"Running", 0}, {"Reconfiguring", 0}, {"Stopped", 0}, {"Failed", 0}};
        for (const auto& [state, n] : m.counts()) j[std::string(to_string(state))] = n;
        return j;
    };
    json bus = json::object();
    for (const auto& [id, s] : agent.bus().stats()) {
        bus[id] = {{"filter", s.filter},     {"capacity", s.capacity}, {"depth", s.depth},
                   {"enqueued", s.enqueued}, {"drained", s.drained},   {"dropped", s.dropped}};
    }
    return json{{"agentVersion", kAgentVersion},
                {"incarnation", agent.incarnation()},
                {"timeMode", agent.options().mode == TimeMode::Virtual ? "virtual" : "wall"},
                {"startedAt", format_timestamp(agent.started_at())},
                {"uptimeMs", agent.uptime().count()},
                {"plugins",
                 {{"total", plugins.size()},
                  {"builtin", builtin},
                  {"external", plugins.size() - builtin},
                  {"collectors", collectors},
                  {"publishers", plugins.size() - collectors}}},
                {"instances", {{"collectors", counts(agent.collectors())}, {"publishers", counts(agent.publishers())}}},
                {"bus", std::move(bus)}};
}

}  // namespace reprobe
