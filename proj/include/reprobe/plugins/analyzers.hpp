// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprobe/collector/collector.hpp"

namespace reprobe {

/// sigma / max(|mean|, epsilon), with the population standard deviation.
/// Throws Error(WindowTooShort) below two values, Error(NonFiniteValue) on NaN/inf.
double stability_score(std::span<const double> window, double epsilon = 1e-9);

struct AdaptiveRateParams {
    std::size_t window_size = 8;
    double low_threshold = 0.05;
    double high_threshold = 0.25;
    double factor = 2.0;
    Duration min_period{50};
    Duration max_period{1600};
    double epsilon = 1e-9;

    /// Missing params keep their defaults.
    static AdaptiveRateParams from_config(const InstanceConfig& cfg);
};

struct AdaptiveDecision {
    double score = 0.0;               // the maximum over indicators
    std::string deciding_indicator;   // the indicator that produced `score`
    std::optional<AdaptationCommand> command;
};

/// One decision over complete windows (one per indicator): below the low
/// threshold the period grows by `factor`, above the high threshold it shrinks,
/// in between nothing is issued. The result is clamped to [min, max].
AdaptiveDecision adaptive_analyze(const std::map<std::string, std::vector<double>>& windows,
                                  const AdaptiveRateParams& params, Duration current_period,
                                  const std::string& analyzer_id = "adaptive-rate");

/// Period after scaling by `factor` (or dividing when `grow` is false), rounded
/// to whole milliseconds and clamped.
Duration scaled_period(Duration current, const AdaptiveRateParams& params, bool grow);

class PassthroughAnalyzer final : public Analyzer {
  public:
    AnalysisResult analyze(const TickContext&, std::vector<Observation> batch) override {
        return {std::move(batch), {}};
    }
    void reset() override {}
};

/// Emits one record per indicator every N inputs (param aggregateWindow):
/// value = mean, labels agg.min, agg.max, agg.count. The window then restarts.
class AggregatorAnalyzer final : public Analyzer {
  public:
    AnalysisResult analyze(const TickContext& ctx, std::vector<Observation> batch) override;
    void reset() override { windows_.clear(); }

  private:
    std::map<std::string, std::vector<Observation>> windows_;
};

/// Passes data through unchanged; every windowSize ticks it scores the
/// per-indicator windows and may ask for a new sampling period.
class AdaptiveRateAnalyzer final : public Analyzer {
  public:
    explicit AdaptiveRateAnalyzer(std::string id = "adaptive-rate") : id_(std::move(id)) {}
    AnalysisResult analyze(const TickContext& ctx, std::vector<Observation> batch) override;
    void reset() override { windows_.clear(); }

  private:
    std::string id_;
    std::map<std::string, std::vector<double>> windows_;
};

}  // namespace reprobe
