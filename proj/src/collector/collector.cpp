// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/collector/collector.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "reprobe/core/duration.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

void BehaviorSet::add_sampler(std::string id, std::unique_ptr<Sampler> sampler) {
    samplers_[std::move(id)] = std::move(sampler);
}

void BehaviorSet::add_analyzer(std::string id, std::unique_ptr<Analyzer> analyzer) {
    analyzers_[std::move(id)] = std::move(analyzer);
}

Sampler* BehaviorSet::sampler(std::string_view id) {
    auto it = samplers_.find(id);
    return it == samplers_.end() ? nullptr : it->second.get();
}

Analyzer* BehaviorSet::analyzer(std::string_view id) {
    auto it = analyzers_.find(id);
    return it == analyzers_.end() ? nullptr : it->second.get();
}

std::string_view to_string(ChangeSource source) noexcept {
    return source == ChangeSource::Api ? "api" : "analyzer";
}

namespace {

std::string describe_patch(const ConfigPatch& patch) {
    std::vector<std::string> fields;
    if (patch.plugin_id) fields.push_back("pluginId");
    if (patch.target) fields.push_back("target");
    if (patch.indicators) fields.push_back("indicators");
    if (patch.sampling_period) fields.push_back("samplingPeriod=" + format_duration(*patch.sampling_period));
    if (patch.active_sampler) fields.push_back("activeSampler=" + *patch.active_sampler);
    if (patch.active_analyzer) fields.push_back("activeAnalyzer=" + *patch.active_analyzer);
    for (const auto& [key, value] : patch.params) fields.push_back("params." + key);
    if (patch.topics) fields.push_back("topics");
    if (fields.empty()) return "patch (no fields)";
    std::string out = "patch ";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ", ";
        out += fields[i];
    }
    return out;
}

}  // namespace

Duration clamp_period(Duration period, const InstanceConfig& cfg, const PeriodBounds& bounds) {
    Duration lo = bounds.min;
    Duration hi = bounds.max;
    if (auto min = cfg.param<Duration>("minPeriod")) lo = std::max(lo, *min);
    if (auto max = cfg.param<Duration>("maxPeriod")) hi = std::min(hi, *max);
    if (lo > hi) return period;  // validation rejects this combination
    return std::clamp(period, lo, hi);
}

CollectorRuntime::CollectorRuntime(std::string instance_id, PluginDescriptor descriptor,
                                   InstanceConfig config, std::unique_ptr<CollectorBackend> backend,
                                   DataManager& bus, Options options)
    : instance_id_(std::move(instance_id)),
      descriptor_(std::move(descriptor)),
      backend_(std::move(backend)),
      bus_(bus),
      options_(std::move(options)),
      config_(std::move(config)) {
    config_.sampling_period = clamp_period(config_.sampling_period, config_, options_.bounds);
}

void CollectorRuntime::start() {
    std::lock_guard lock(mutex_);
    backend_->start(config_);
}

void CollectorRuntime::stop() {
    std::lock_guard lock(mutex_);
    backend_->stop();
}

std::string CollectorRuntime::target_name_locked() const {
    if (auto it = config_.target.find("name"); it != config_.target.end()) return it->second;
    return instance_id_;
}

CollectorRuntime::TickReport CollectorRuntime::run_tick(TimePoint now) {
    std::lock_guard lock(mutex_);
    TickReport report;
    const TickContext ctx{config_, instance_id_, now, tick_count_, config_.sampling_period};
    last_tick_ = now;

    std::uint64_t samplers_consulted = 0;
    std::uint64_t analyzers_consulted = 0;
    auto fail = [&](const std::string& what) {
        ++stats_.failures;
        ++stats_.consecutive_failures;
        stats_.last_error = what;
        spdlog::warn("collector '{}' tick {} failed: {}", instance_id_, tick_count_, what);
        ++tick_count_;
        ++stats_.ticks;
        stats_.max_samplers_per_tick = std::max(stats_.max_samplers_per_tick, samplers_consulted);
        stats_.max_analyzers_per_tick = std::max(stats_.max_analyzers_per_tick, analyzers_consulted);
        report.status = stats_.consecutive_failures >= options_.failure_threshold
                            ? TickStatus::Failed
                            : TickStatus::Skipped;
        return report;
    };

    Sampler* sampler = backend_->sampler(config_.active_sampler);
    Analyzer* analyzer = backend_->analyzer(config_.active_analyzer);
    if (sampler == nullptr || analyzer == nullptr) {
        return fail("active sampler or analyzer is not available");
    }

    SampleResult sampled;
    ++samplers_consulted;
    ++stats_.sampler_calls[config_.active_sampler];
    try {
        sampled = sampler->sample(ctx);
    } catch (const std::exception& e) {
        return fail(e.what());
    }

    std::vector<Observation> batch;
    batch.reserve(sampled.samples.size());
    const std::string target = target_name_locked();
    const std::string& topic = config_.topics.front();
    for (auto& s : sampled.samples) {
        const bool in_set = std::find(config_.indicators.begin(), config_.indicators.end(),
                                      s.indicator) != config_.indicators.end();
        if (!in_set || !std::isfinite(s.value)) {
            ++stats_.discarded;
            continue;
        }
        batch.push_back(Observation{std::move(s.indicator), target, now, s.value, std::move(s.unit),
                                    std::move(s.labels), topic, instance_id_});
    }

    AnalysisResult analyzed;
    ++analyzers_consulted;
    ++stats_.analyzer_calls[config_.active_analyzer];
    try {
        analyzed = analyzer->analyze(ctx, std::move(batch));
    } catch (const std::exception& e) {
        return fail(std::string("analyzer: ") + e.what());
    }
    stats_.consecutive_failures = 0;

    std::erase_if(analyzed.observations, [&](const Observation& obs) {
        const bool keep = std::find(config_.indicators.begin(), config_.indicators.end(),
                                    obs.indicator) != config_.indicators.end() &&
                          std::isfinite(obs.value);
        if (!keep) ++stats_.discarded;
        return !keep;
    });
    for (auto& obs : analyzed.observations) {
        obs.topic = topic;
        obs.source_instance = instance_id_;
        if (obs.target.empty()) obs.target = target;
        if (to_unix_nanos(obs.timestamp) <= 0) obs.timestamp = now;
    }
    if (!analyzed.observations.empty()) bus_.publish(analyzed.observations);
    report.emitted = analyzed.observations.size();
    stats_.emitted += report.emitted;

    for (auto& cmd : sampled.commands) {
        if (cmd.issued_by.empty()) cmd.issued_by = config_.active_analyzer;
        report.issued.push_back(std::move(cmd));
    }
    for (auto& cmd : analyzed.commands) {
        if (cmd.issued_by.empty()) cmd.issued_by = config_.active_analyzer;
        report.issued.push_back(std::move(cmd));
    }
    // Commands take effect before the next tick is scheduled.
    for (const auto& cmd : report.issued) apply_command_locked(ChangeSource::Analyzer, cmd);

    ++tick_count_;
    ++stats_.ticks;
    stats_.max_samplers_per_tick = std::max(stats_.max_samplers_per_tick, samplers_consulted);
    stats_.max_analyzers_per_tick = std::max(stats_.max_analyzers_per_tick, analyzers_consulted);
    return report;
}

InstanceConfig CollectorRuntime::controller_apply(ChangeSource source, const ConfigPatch& patch,
                                                  const std::string& reason) {
    std::lock_guard lock(mutex_);
    AuditEntry entry;
    entry.source = source;
    entry.reason = reason;
    entry.issued_by = source == ChangeSource::Api ? "api" : config_.active_analyzer;
    entry.change = describe_patch(patch);
    return apply_locked(source, patch, std::move(entry));
}

void CollectorRuntime::controller_apply(ChangeSource source, const AdaptationCommand& command) {
    std::lock_guard lock(mutex_);
    if (auto error = apply_command_locked(source, command)) {
        throw Error(ErrorCode::InvalidCommand, *error);
    }
}

InstanceConfig CollectorRuntime::apply_locked(ChangeSource source, const ConfigPatch& patch,
                                              AuditEntry entry) {
    entry.tick = tick_count_;
    entry.at = last_tick_;
    entry.period_before = config_.sampling_period;
    entry.period_after = config_.sampling_period;
    try {
        if (patch.plugin_id && *patch.plugin_id != descriptor_.id) {
            throw Error(ErrorCode::InvalidConfig, "pluginId cannot be changed",
                        {{ErrorCode::InvalidConfig, "pluginId", "instances cannot be rebound"}});
        }
        InstanceConfig merged = apply_patch(config_, patch);
        InstanceConfig next = validate_or_throw(merged, descriptor_, PluginKind::Collector,
                                                options_.bounds, options_.extra_check);
        next.sampling_period = clamp_period(next.sampling_period, next, options_.bounds);
        backend_->configure(next);

        const bool sampler_changed = next.active_sampler != config_.active_sampler;
        const bool analyzer_changed = next.active_analyzer != config_.active_analyzer;
        entry.self_replacement = source == ChangeSource::Analyzer && analyzer_changed;
        config_ = std::move(next);
        if (sampler_changed || analyzer_changed) {
            if (Sampler* s = backend_->sampler(config_.active_sampler)) s->reset();
            if (Analyzer* a = backend_->analyzer(config_.active_analyzer)) a->reset();
        }
        entry.period_after = config_.sampling_period;
        record_locked(entry);
        return config_;
    } catch (const Error& e) {
        entry.applied = false;
        entry.error = e.what();
        record_locked(entry);
        if (e.code() == ErrorCode::InvalidConfig) throw;
        throw Error(ErrorCode::InvalidConfig, e.what(), e.details());
    } catch (const std::exception& e) {
        entry.applied = false;
        entry.error = e.what();
        record_locked(entry);
        throw Error(ErrorCode::InvalidConfig, std::string("configuration rejected: ") + e.what());
    }
}

std::optional<std::string> CollectorRuntime::apply_command_locked(ChangeSource source,
                                                                 const AdaptationCommand& command) {
    ConfigPatch patch;
    struct Visitor {
        ConfigPatch& patch;
        const InstanceConfig& cfg;
        const PeriodBounds& bounds;
        void operator()(const SetSamplingPeriod& c) {
            patch.sampling_period = clamp_period(c.period, cfg, bounds);
        }
        void operator()(const SwitchSampler& c) { patch.active_sampler = c.id; }
        void operator()(const SwitchAnalyzer& c) { patch.active_analyzer = c.id; }
        void operator()(const SetParam& c) { patch.params[c.key] = c.value; }
    };
    std::visit(Visitor{patch, config_, options_.bounds}, command.action);

    AuditEntry entry;
    entry.source = source;
    entry.change = describe(command);
    entry.issued_by = command.issued_by;
    entry.reason = command.reason;
    try {
        apply_locked(source, patch, std::move(entry));
        ++stats_.commands_applied;
        return std::nullopt;
    } catch (const Error& e) {
        ++stats_.commands_rejected;
        spdlog::warn("collector '{}' rejected {}: {}", instance_id_, describe(command), e.what());
        return std::string(e.what());
    }
}

void CollectorRuntime::record_locked(AuditEntry entry) {
    audit_.push_back(std::move(entry));
    while (audit_.size() > options_.audit_capacity) audit_.pop_front();
}

Duration CollectorRuntime::effective_period() const {
    std::lock_guard lock(mutex_);
    return config_.sampling_period;
}

InstanceConfig CollectorRuntime::config() const {
    std::lock_guard lock(mutex_);
    return config_;
}

std::vector<AuditEntry> CollectorRuntime::audit() const {
    std::lock_guard lock(mutex_);
    return {audit_.begin(), audit_.end()};
}

CollectorStats CollectorRuntime::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

}  // namespace reprobe
