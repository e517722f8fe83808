// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "reprobe/core/codec.hpp"
#include "reprobe/core/error.hpp"
#include "reprobe/harness/harness.hpp"

namespace reprobe {

std::string_view to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::SelfAdaptive: return "self-adaptive";
        case Verdict::ApiDriven: return "API-driven";
        case Verdict::Partially: return "partially";
        case Verdict::Manual: return "manual";
    }
    return "?";
}

int ScenarioReport::manual_steps() const {
    int n = 0;
    for (const auto& s : steps) n += s.manual_steps;
    return n;
}

int ScenarioReport::api_calls() const {
    int n = 0;
    for (const auto& s : steps) n += s.api_calls;
    return n;
}

nlohmann::json report_to_json(const ScenarioReport& r) {
    using nlohmann::json;
    json steps = json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"description", s.description},
                         {"apiCallsIssued", s.api_calls},
                         {"manualStepsRequired", s.manual_steps}});
    }
    json trajectory = json::array();
    for (const auto& p : r.trajectory) trajectory.push_back({{"tick", p.tick}, {"periodMs", p.period_ms}});
    return json{{"scenarioId", r.scenario_id},
                {"steps", std::move(steps)},
                {"maxGapMs", r.max_gap_ms},
                {"adaptationTrajectory", std::move(trajectory)},
                {"verdict", to_string(r.verdict)},
                {"apiCallsAfterSetup", r.api_calls_after_setup},
                {"uptimeUninterrupted", r.uptime_uninterrupted},
                {"failures", r.failures}};
}

std::map<std::pair<std::string, std::string>, GapStats> measure_gaps(const std::vector<Observation>& records,
                                                                    bool by_instance) {
    if (records.empty()) throw Error(ErrorCode::EmptyStream, "no records to measure");
    std::map<std::pair<std::string, std::string>, std::vector<std::int64_t>> streams;
    for (const auto& r : records) {
        streams[{by_instance ? r.source_instance : std::string(), r.indicator}].push_back(to_unix_nanos(r.timestamp));
    }
    std::map<std::pair<std::string, std::string>, GapStats> out;
    for (auto& [key, ts] : streams) {
        std::sort(ts.begin(), ts.end());
        std::vector<std::int64_t> gaps;
        for (std::size_t i = 1; i < ts.size(); ++i) gaps.push_back(ts[i] - ts[i - 1]);
        GapStats s;
        s.records = ts.size();
        if (!gaps.empty()) {
            s.max = std::chrono::nanoseconds(*std::max_element(gaps.begin(), gaps.end()));
            auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
            std::nth_element(gaps.begin(), mid, gaps.end());
            s.median = std::chrono::nanoseconds(*mid);
        }
        out[key] = s;
    }
    return out;
}

std::vector<Observation> read_sink_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    const auto last = text.rfind('\n');
    text.resize(last == std::string::npos ? 0 : last + 1);
    return decode_ndjson(text);
}

namespace {

std::map<std::int64_t, std::vector<const Observation*>> ticks_of(const std::vector<Observation>& records,
                                                                const std::string& source_instance) {
    std::map<std::int64_t, std::vector<const Observation*>> ticks;
    for (const auto& r : records) {
        if (r.source_instance == source_instance) ticks[to_unix_nanos(r.timestamp)].push_back(&r);
    }
    return ticks;
}

}  // namespace

std::vector<TrajectoryPoint> trajectory_from_records(const std::vector<Observation>& records,
                                                     const std::string& source_instance) {
    const auto ticks = ticks_of(records, source_instance);
    std::vector<TrajectoryPoint> out;
    std::uint64_t tick = 0;
    for (auto it = ticks.begin(); it != ticks.end(); ++it, ++tick) {
        auto next = std::next(it);
        if (next == ticks.end()) break;
        const std::int64_t gap_ns = next->first - it->first;
        out.push_back(TrajectoryPoint{tick, gap_ns / 1'000'000});
    }
    return out;
}

std::vector<TrajectoryPoint> replay_adaptive(const std::vector<Observation>& records,
                                             const std::string& source_instance,
                                             const std::vector<std::string>& indicators,
                                             const AdaptiveRateParams& params, Duration initial) {
    const auto ticks = ticks_of(records, source_instance);
    const std::set<std::string> wanted(indicators.begin(), indicators.end());
    std::map<std::string, std::vector<double>> windows;
    Duration current = initial;
    std::vector<TrajectoryPoint> out;
    std::uint64_t tick = 0;
    for (const auto& [ts, obs] : ticks) {
        for (const Observation* o : obs) {
            if (!wanted.contains(o->indicator)) continue;
            auto& w = windows[o->indicator];
            w.push_back(o->value);
            if (w.size() > params.window_size) w.erase(w.begin());
        }
        const bool complete =
            windows.size() == wanted.size() &&
            std::all_of(windows.begin(), windows.end(),
                        [&](const auto& kv) { return kv.second.size() >= params.window_size; });
        if (complete) {
            const auto decision = adaptive_analyze(windows, params, current);
            if (decision.command) current = std::get<SetSamplingPeriod>(decision.command->action).period;
            windows.clear();
        }
        out.push_back(TrajectoryPoint{tick++, current.count()});
    }
    return out;
}

}  // namespace reprobe
