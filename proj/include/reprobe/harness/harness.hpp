// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprobe/agent/agent.hpp"
#include "reprobe/plugins/analyzers.hpp"

namespace reprobe {

/// How much operator involvement a scenario needed.
enum class Verdict { SelfAdaptive, ApiDriven, Partially, Manual };
std::string_view to_string(Verdict verdict) noexcept;

struct ScenarioStep {
    std::string description;
    int api_calls = 0;
    int manual_steps = 0;
};

struct TrajectoryPoint {
    std::uint64_t tick = 0;
    std::int64_t period_ms = 0;
    bool operator==(const TrajectoryPoint&) const = default;
};

struct ScenarioReport {
    std::string scenario_id;
    std::vector<ScenarioStep> steps;
    std::map<std::string, double> max_gap_ms;  // per pre-existing collector
    std::vector<TrajectoryPoint> trajectory;
    Verdict verdict = Verdict::Manual;
    int api_calls_after_setup = 0;
    bool uptime_uninterrupted = false;
    std::vector<std::string> failures;  // empty when every check passed

    int manual_steps() const;
    int api_calls() const;
};

nlohmann::json report_to_json(const ScenarioReport& report);

struct GapStats {
    std::chrono::nanoseconds max{0};
    std::chrono::nanoseconds median{0};
    std::size_t records = 0;
};

/// Gap statistics per (sourceInstance, indicator) stream, or per indicator
/// alone when `by_instance` is false. Throws Error(EmptyStream) on no records.
std::map<std::pair<std::string, std::string>, GapStats> measure_gaps(
    const std::vector<Observation>& records, bool by_instance = true);

/// Reads the complete lines of an NDJSON sink file (a trailing partial line is ignored).
std::vector<Observation> read_sink_file(const std::filesystem::path& path);

/// Period in force after each tick, derived from consecutive tick timestamps
/// of one collector's records.
std::vector<TrajectoryPoint> trajectory_from_records(const std::vector<Observation>& records,
                                                     const std::string& source_instance);

/// Replays recorded values through adaptive_analyze tick by tick and returns
/// the period in force after each tick, starting from `initial`.
std::vector<TrajectoryPoint> replay_adaptive(const std::vector<Observation>& records,
                                             const std::string& source_instance,
                                             const std::vector<std::string>& indicators,
                                             const AdaptiveRateParams& params, Duration initial);

struct DatacenterOptions {
    TimeMode mode = TimeMode::Virtual;
    Duration baseline_period{100};
    Duration patched_period{200};
    Duration phase{2000};        // observation time between steps
    bool restart_agent = false;  // negative control
    std::filesystem::path work_dir;  // empty: temp dir
};

/// A new data center appears and is brought under monitoring
/// through the API alone.
ScenarioReport run_scenario_datacenter(const DatacenterOptions& options = {});

struct AdaptiveOptions {
    bool adaptive = true;  // false: passthrough analyzer (negative control)
    std::uint64_t seed = 7;
    std::int64_t segment_ticks = 96;  // 12 windows of the default size 8
    Duration initial_period{100};
    std::filesystem::path work_dir;
};

/// The collector adapts its sampling period to indicator
/// trends without any API call after setup. Always runs in virtual time.
ScenarioReport run_scenario_adaptive(const AdaptiveOptions& options = {});

}  // namespace reprobe
