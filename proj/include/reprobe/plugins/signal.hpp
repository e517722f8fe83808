// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reprobe/collector/collector.hpp"

namespace reprobe {

enum class Waveform { Constant, Sine, RandomWalk };

struct SignalSegment {
    std::int64_t duration_ticks = 1;
    Waveform waveform = Waveform::Constant;
    double base = 0.0;
    double amplitude = 0.0;    // sine: peak deviation; randomWalk: step standard deviation
    double noise_sigma = 0.0;  // white Gaussian noise added on top

    bool operator==(const SignalSegment&) const = default;
};

/// A piecewise synthetic target. Past the last segment, the last segment continues.
struct SyntheticSignalSpec {
    std::vector<SignalSegment> segments;
    std::uint64_t seed = 0;

    bool operator==(const SyntheticSignalSpec&) const = default;
};

/// Parses "waveform:ticks:base[:amplitude[:noiseSigma]]" segments joined by ';',
/// e.g. "constant:96:42;randomWalk:96:10:1:50". Throws Error(InvalidConfig).
SyntheticSignalSpec parse_signal_spec(std::string_view text, std::uint64_t seed);
std::string format_signal_spec(const SyntheticSignalSpec& spec);

/// Value of the signal for `indicator` at `tick`. A pure function of its
/// arguments: equal inputs give bit-identical outputs.
double synthetic_value(const SyntheticSignalSpec& spec, std::string_view indicator,
                       std::int64_t tick);

/// Same values as synthetic_value(), but amortized O(1) for sequential ticks.
class SignalGenerator {
  public:
    explicit SignalGenerator(SyntheticSignalSpec spec) : spec_(std::move(spec)) {}
    double value(std::string_view indicator, std::int64_t tick);
    const SyntheticSignalSpec& spec() const { return spec_; }

  private:
    struct Cursor {
        std::int64_t tick = -1;
        double walk = 0.0;
    };
    SyntheticSignalSpec spec_;
    std::map<std::string, Cursor, std::less<>> cursors_;
};

/// Reads the synthetic target. Target keys: "signal" (segment list), "seed",
/// "unit". With param fingerprint=true every sample carries a "cfg.fingerprint"
/// label describing the config tuple in force for the tick.
class SyntheticSampler final : public Sampler {
  public:
    /// `smoothing` > 1 averages that many consecutive ticks ending at the current one.
    explicit SyntheticSampler(int smoothing = 1) : smoothing_(smoothing) {}
    SampleResult sample(const TickContext& ctx) override;
    void reset() override { history_.clear(); }

  private:
    SignalGenerator& generator_for(const InstanceConfig& cfg);

    int smoothing_;
    std::string spec_key_;
    std::unique_ptr<SignalGenerator> generator_;
    std::map<std::string, std::map<std::int64_t, double>> history_;
};

/// "period|indicators|sampler|analyzer", as attached by the fingerprint option.
std::string config_fingerprint(const InstanceConfig& cfg);

}  // namespace reprobe
