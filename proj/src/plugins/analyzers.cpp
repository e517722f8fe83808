// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/plugins/analyzers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

double stability_score(std::span<const double> window, double epsilon) {
    if (window.size() < 2) {
        throw Error(ErrorCode::WindowTooShort, "stability score needs at least two values");
    }
    // Welford's recurrence.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double x : window) {
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "window holds a non-finite value");
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    const double sigma = std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));
    if (sigma == 0.0) return 0.0;
    return sigma / std::max(std::abs(mean), epsilon);
}

AdaptiveRateParams AdaptiveRateParams::from_config(const InstanceConfig& cfg) {
    AdaptiveRateParams p;
    if (auto v = cfg.param<std::int64_t>("windowSize")) p.window_size = static_cast<std::size_t>(*v);
    if (auto v = cfg.param<double>("lowThreshold")) p.low_threshold = *v;
    if (auto v = cfg.param<double>("highThreshold")) p.high_threshold = *v;
    if (auto v = cfg.param<double>("factor")) p.factor = *v;
    if (auto v = cfg.param<Duration>("minPeriod")) p.min_period = *v;
    if (auto v = cfg.param<Duration>("maxPeriod")) p.max_period = *v;
    if (auto v = cfg.param<double>("epsilon")) p.epsilon = *v;
    return p;
}

Duration scaled_period(Duration current, const AdaptiveRateParams& params, bool grow) {
    const double ms = static_cast<double>(current.count());
    const double scaled = grow ? ms * params.factor : ms / params.factor;
    const double bounded = std::clamp(scaled, static_cast<double>(params.min_period.count()),
                                      static_cast<double>(params.max_period.count()));
    return Duration(static_cast<Duration::rep>(std::llround(bounded)));
}

AdaptiveDecision adaptive_analyze(const std::map<std::string, std::vector<double>>& windows,
                                  const AdaptiveRateParams& params, Duration current_period,
                                  const std::string& analyzer_id) {
    AdaptiveDecision decision;
    decision.score = -std::numeric_limits<double>::infinity();
    for (const auto& [indicator, values] : windows) {
        const double score = stability_score(values, params.epsilon);
        if (score > decision.score) {
            decision.score = score;
            decision.deciding_indicator = indicator;
        }
    }
    if (windows.empty()) {
        decision.score = 0.0;
        return decision;
    }
    if (decision.score < params.low_threshold) {
        decision.command = AdaptationCommand{
            SetSamplingPeriod{scaled_period(current_period, params, true)}, analyzer_id,
            fmt::format("stable: score={:.6g} < low={:.6g} ({})", decision.score,
                        params.low_threshold, decision.deciding_indicator)};
    } else if (decision.score > params.high_threshold) {
        decision.command = AdaptationCommand{
            SetSamplingPeriod{scaled_period(current_period, params, false)}, analyzer_id,
            fmt::format("unstable: score={:.6g} > high={:.6g} ({})", decision.score,
                        params.high_threshold, decision.deciding_indicator)};
    }
    return decision;
}

AnalysisResult AggregatorAnalyzer::analyze(const TickContext& ctx, std::vector<Observation> batch) {
    const auto n = static_cast<std::size_t>(
        std::max<std::int64_t>(1, ctx.config.param<std::int64_t>("aggregateWindow").value_or(5)));
    AnalysisResult out;
    for (auto& obs : batch) {
        auto& window = windows_[obs.indicator];
        window.push_back(std::move(obs));
        if (window.size() < n) continue;

        double sum = 0.0;
        double lo = window.front().value;
        double hi = window.front().value;
        for (const auto& o : window) {
            sum += o.value;
            lo = std::min(lo, o.value);
            hi = std::max(hi, o.value);
        }
        Observation agg = window.back();
        agg.value = sum / static_cast<double>(window.size());
        agg.labels["agg"] = "mean";
        agg.labels["agg.min"] = fmt::format("{}", lo);
        agg.labels["agg.max"] = fmt::format("{}", hi);
        agg.labels["agg.count"] = std::to_string(window.size());
        out.observations.push_back(std::move(agg));
        window.clear();
    }
    return out;
}

AnalysisResult AdaptiveRateAnalyzer::analyze(const TickContext& ctx, std::vector<Observation> batch) {
    const AdaptiveRateParams params = AdaptiveRateParams::from_config(ctx.config);
    for (const auto& obs : batch) {
        auto& window = windows_[obs.indicator];
        window.push_back(obs.value);
        if (window.size() > params.window_size) window.erase(window.begin());
    }
    // Indicators dropped from the config no longer take part.
    std::erase_if(windows_, [&](const auto& kv) {
        return std::find(ctx.config.indicators.begin(), ctx.config.indicators.end(), kv.first) ==
               ctx.config.indicators.end();
    });

    AnalysisResult out{std::move(batch), {}};
    const bool complete =
        !windows_.empty() && windows_.size() == ctx.config.indicators.size() &&
        std::all_of(windows_.begin(), windows_.end(),
                    [&](const auto& kv) { return kv.second.size() >= params.window_size; });
    if (!complete) return out;

    auto decision = adaptive_analyze(windows_, params, ctx.period, id_);
    if (decision.command) out.commands.push_back(std::move(*decision.command));
    windows_.clear();  // tumbling windows
    return out;
}

}  // namespace reprobe
