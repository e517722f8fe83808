// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reprobe/bus/data_manager.hpp"
#include "reprobe/core/types.hpp"
#include "reprobe/core/validate.hpp"

namespace reprobe {

/// What a sampler or analyzer sees during one tick. Constant for the whole tick.
struct TickContext {
    const InstanceConfig& config;
    std::string_view instance_id;
    TimePoint now;
    std::uint64_t tick = 0;  // 0-based
    Duration period{};
};

struct Sample {
    std::string indicator;
    double value = 0.0;
    std::string unit;
    Labels labels;
};

struct SampleResult {
    std::vector<Sample> samples;
    /// Only external plugins, which analyze out of process, fill this.
    std::vector<AdaptationCommand> commands;
};

/// Metric Sampler: reads the configured indicators from the target.
class Sampler {
  public:
    virtual ~Sampler() = default;
    /// Throws on failure; the tick is then skipped and counted.
    virtual SampleResult sample(const TickContext& ctx) = 0;
    virtual void reset() {}
};

struct AnalysisResult {
    std::vector<Observation> observations;
    std::vector<AdaptationCommand> commands;
};

/// Data Analyzer: transforms sampled observations and may ask the controller
/// to adapt the collector.
class Analyzer {
  public:
    virtual ~Analyzer() = default;
    virtual AnalysisResult analyze(const TickContext& ctx, std::vector<Observation> batch) = 0;
    /// Discards any buffered window.
    virtual void reset() = 0;
};

/// The samplers and analyzers of one collector instance, plus lifecycle hooks
/// for behaviors living outside the process.
class CollectorBackend {
  public:
    virtual ~CollectorBackend() = default;
    /// Throws Error(SpawnFailed) if the backend cannot come up.
    virtual void start(const InstanceConfig&) {}
    /// Called with every new effective config before it is swapped in; throwing rejects it.
    virtual void configure(const InstanceConfig&) {}
    virtual void stop() {}
    virtual Sampler* sampler(std::string_view id) = 0;
    virtual Analyzer* analyzer(std::string_view id) = 0;
};

/// In-process behaviors keyed by id.
class BehaviorSet final : public CollectorBackend {
  public:
    void add_sampler(std::string id, std::unique_ptr<Sampler> sampler);
    void add_analyzer(std::string id, std::unique_ptr<Analyzer> analyzer);

    Sampler* sampler(std::string_view id) override;
    Analyzer* analyzer(std::string_view id) override;

  private:
    std::map<std::string, std::unique_ptr<Sampler>, std::less<>> samplers_;
    std::map<std::string, std::unique_ptr<Analyzer>, std::less<>> analyzers_;
};

enum class ChangeSource { Api, Analyzer };
std::string_view to_string(ChangeSource source) noexcept;

struct AuditEntry {
    std::uint64_t tick = 0;
    TimePoint at{};
    ChangeSource source = ChangeSource::Api;
    std::string change;
    std::string issued_by;
    std::string reason;
    bool applied = true;
    std::string error;
    Duration period_before{};
    Duration period_after{};
    bool self_replacement = false;  // an analyzer switched the active analyzer
};

struct CollectorStats {
    std::uint64_t ticks = 0;
    std::uint64_t emitted = 0;
    std::uint64_t failures = 0;
    std::uint64_t consecutive_failures = 0;
    std::uint64_t discarded = 0;  // samples outside the indicator set or non-finite
    std::uint64_t commands_applied = 0;
    std::uint64_t commands_rejected = 0;
    std::map<std::string, std::uint64_t> sampler_calls;
    std::map<std::string, std::uint64_t> analyzer_calls;
    std::uint64_t max_samplers_per_tick = 0;
    std::uint64_t max_analyzers_per_tick = 0;
    std::optional<std::string> last_error;
};

/// Clamps into the [minPeriod, maxPeriod] params (when declared) and the global bounds.
Duration clamp_period(Duration period, const InstanceConfig& cfg, const PeriodBounds& bounds);

/// A running collector: the tick loop (sampler -> analyzer -> Data Manager) and
/// the Controller that applies configuration changes between ticks. Every change,
/// whether from the API or from an analyzer, goes through controller_apply().
class CollectorRuntime {
  public:
    struct Options {
        PeriodBounds bounds;
        ExtraConfigCheck extra_check;
        std::uint64_t failure_threshold = 5;
        std::size_t audit_capacity = 512;
    };

    enum class TickStatus { Emitted, Skipped, Failed };
    struct TickReport {
        TickStatus status = TickStatus::Emitted;
        std::size_t emitted = 0;
        std::vector<AdaptationCommand> issued;
    };

    /// `config` must already be validated against `descriptor`.
    CollectorRuntime(std::string instance_id, PluginDescriptor descriptor, InstanceConfig config,
                     std::unique_ptr<CollectorBackend> backend, DataManager& bus, Options options);

    void start();
    void stop();

    TickReport run_tick(TimePoint now);

    /// Merges `patch`, validates, and swaps the whole config between ticks.
    /// Throws Error(InvalidConfig); the old config stays in force on failure.
    InstanceConfig controller_apply(ChangeSource source, const ConfigPatch& patch,
                                    const std::string& reason = {});
    /// Throws Error(InvalidCommand) if the command cannot be applied.
    void controller_apply(ChangeSource source, const AdaptationCommand& command);

    Duration effective_period() const;
    InstanceConfig config() const;
    std::vector<AuditEntry> audit() const;
    CollectorStats stats() const;
    const std::string& instance_id() const { return instance_id_; }
    const PluginDescriptor& descriptor() const { return descriptor_; }

  private:
    InstanceConfig apply_locked(ChangeSource source, const ConfigPatch& patch, AuditEntry entry);
    std::optional<std::string> apply_command_locked(ChangeSource source,
                                                   const AdaptationCommand& command);
    void record_locked(AuditEntry entry);
    std::string target_name_locked() const;

    const std::string instance_id_;
    const PluginDescriptor descriptor_;
    std::unique_ptr<CollectorBackend> backend_;
    DataManager& bus_;
    const Options options_;

    mutable std::mutex mutex_;  // the serialization point: held for a whole tick
    InstanceConfig config_;
    std::uint64_t tick_count_ = 0;
    TimePoint last_tick_{};
    CollectorStats stats_;
    std::deque<AuditEntry> audit_;
};

}  // namespace reprobe
