// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/plugins/signal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

namespace {

// Counter-based generator (splitmix64 finalizer): value depends only on the
// input, so any tick can be regenerated without replaying earlier ones.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double uniform01(std::uint64_t key) {
    // 53 random bits in (0, 1]; never 0 so log() below is finite.
    return (static_cast<double>(mix(key) >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller on two independent uniforms derived from (stream, tick).
double standard_normal(std::uint64_t stream, std::int64_t tick) {
    const std::uint64_t key = mix(stream ^ mix(static_cast<std::uint64_t>(tick)));
    const double u1 = uniform01(key);
    const double u2 = uniform01(key ^ 0x5851f42d4c957f2dULL);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Located {
    const SignalSegment* segment;
    std::int64_t local;  // tick offset inside the segment
};

Located locate(const SyntheticSignalSpec& spec, std::int64_t tick) {
    std::int64_t start = 0;
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
        const auto& seg = spec.segments[i];
        if (tick < start + seg.duration_ticks || i + 1 == spec.segments.size()) {
            return {&seg, tick - start};
        }
        start += seg.duration_ticks;
    }
    return {nullptr, 0};
}

std::uint64_t noise_stream(const SyntheticSignalSpec& spec, std::string_view indicator) {
    return mix(spec.seed) ^ fnv1a(indicator);
}

std::uint64_t walk_stream(const SyntheticSignalSpec& spec, std::string_view indicator) {
    return mix(spec.seed ^ 0xa0761d6478bd642fULL) ^ fnv1a(indicator);
}

// Walk steps are indexed by absolute tick, so a cursor can extend the sum.
double walk_step(const SyntheticSignalSpec& spec, std::string_view indicator, const SignalSegment& seg,
                 std::int64_t tick) {
    return seg.amplitude * standard_normal(walk_stream(spec, indicator), tick);
}

double shape(const SyntheticSignalSpec& spec, std::string_view indicator, const Located& at,
             std::int64_t tick, double walk) {
    const SignalSegment& seg = *at.segment;
    double value = seg.base;
    switch (seg.waveform) {
        case Waveform::Constant:
            break;
        case Waveform::Sine:
            value += seg.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(at.local) /
                                              static_cast<double>(seg.duration_ticks));
            break;
        case Waveform::RandomWalk:
            value += walk;
            break;
    }
    if (seg.noise_sigma > 0.0) {
        value += seg.noise_sigma * standard_normal(noise_stream(spec, indicator), tick);
    }
    return value;
}

std::string_view waveform_name(Waveform w) {
    switch (w) {
        case Waveform::Constant: return "constant";
        case Waveform::Sine: return "sine";
        case Waveform::RandomWalk: return "randomWalk";
    }
    return "constant";
}

}  // namespace

SyntheticSignalSpec parse_signal_spec(std::string_view text, std::uint64_t seed) {
    SyntheticSignalSpec spec;
    spec.seed = seed;
    std::stringstream segments{std::string(text)};
    std::string part;
    auto bad = [&](const std::string& why) {
        return Error(ErrorCode::InvalidConfig, "invalid signal segment '" + part + "': " + why,
                     {{ErrorCode::InvalidConfig, "target.signal", why}});
    };
    while (std::getline(segments, part, ';')) {
        if (part.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream fs(part);
        std::string f;
        while (std::getline(fs, f, ':')) fields.push_back(f);
        if (fields.size() < 3 || fields.size() > 5) throw bad("expected waveform:ticks:base[:amplitude[:noise]]");
        SignalSegment seg;
        if (fields[0] == "constant") {
            seg.waveform = Waveform::Constant;
        } else if (fields[0] == "sine") {
            seg.waveform = Waveform::Sine;
        } else if (fields[0] == "randomWalk") {
            seg.waveform = Waveform::RandomWalk;
        } else {
            throw bad("unknown waveform");
        }
        try {
            std::size_t used = 0;
            seg.duration_ticks = std::stoll(fields[1], &used);
            if (used != fields[1].size()) throw bad("ticks is not an integer");
            seg.base = std::stod(fields[2]);
            if (fields.size() > 3) seg.amplitude = std::stod(fields[3]);
            if (fields.size() > 4) seg.noise_sigma = std::stod(fields[4]);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw bad("not a number");
        }
        if (seg.duration_ticks < 1) throw bad("ticks must be at least 1");
        if (!std::isfinite(seg.base) || !std::isfinite(seg.amplitude) ||
            !std::isfinite(seg.noise_sigma) || seg.noise_sigma < 0.0) {
            throw bad("values must be finite and noise non-negative");
        }
        spec.segments.push_back(seg);
    }
    if (spec.segments.empty()) {
        throw Error(ErrorCode::InvalidConfig, "signal needs at least one segment",
                    {{ErrorCode::InvalidConfig, "target.signal", "no segments"}});
    }
    return spec;
}

std::string format_signal_spec(const SyntheticSignalSpec& spec) {
    std::string out;
    for (const auto& s : spec.segments) {
        if (!out.empty()) out += ';';
        out += fmt::format("{}:{}:{}:{}:{}", waveform_name(s.waveform), s.duration_ticks, s.base,
                           s.amplitude, s.noise_sigma);
    }
    return out;
}

double synthetic_value(const SyntheticSignalSpec& spec, std::string_view indicator,
                       std::int64_t tick) {
    const Located at = locate(spec, tick);
    if (at.segment == nullptr) return 0.0;
    double walk = 0.0;
    if (at.segment->waveform == Waveform::RandomWalk) {
        for (std::int64_t t = tick - at.local + 1; t <= tick; ++t) {
            walk += walk_step(spec, indicator, *at.segment, t);
        }
    }
    return shape(spec, indicator, at, tick, walk);
}

double SignalGenerator::value(std::string_view indicator, std::int64_t tick) {
    const Located at = locate(spec_, tick);
    if (at.segment == nullptr) return 0.0;
    if (at.segment->waveform != Waveform::RandomWalk) return shape(spec_, indicator, at, tick, 0.0);

    auto it = cursors_.find(indicator);
    if (it == cursors_.end()) it = cursors_.emplace(std::string(indicator), Cursor{}).first;
    Cursor& c = it->second;
    const std::int64_t segment_start = tick - at.local;
    if (c.tick < segment_start || c.tick > tick) {
        c.tick = segment_start;
        c.walk = 0.0;
    }
    // Same summation order as synthetic_value(), so results stay bit-identical.
    while (c.tick < tick) {
        ++c.tick;
        c.walk += walk_step(spec_, indicator, *at.segment, c.tick);
    }
    return shape(spec_, indicator, at, tick, c.walk);
}

std::string config_fingerprint(const InstanceConfig& cfg) {
    std::string indicators;
    for (const auto& i : cfg.indicators) {
        if (!indicators.empty()) indicators += ',';
        indicators += i;
    }
    return fmt::format("{}|{}|{}|{}", cfg.sampling_period.count(), indicators, cfg.active_sampler,
                       cfg.active_analyzer);
}

SignalGenerator& SyntheticSampler::generator_for(const InstanceConfig& cfg) {
    auto signal = cfg.target.find("signal");
    auto seed = cfg.target.find("seed");
    const std::string text = signal != cfg.target.end() ? signal->second : "constant:1:0";
    const std::string seed_text = seed != cfg.target.end() ? seed->second : "0";
    const std::string key = text + "#" + seed_text;
    if (!generator_ || key != spec_key_) {
        std::uint64_t seed_value = 0;
        try {
            seed_value = std::stoull(seed_text);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "target.seed must be an unsigned integer");
        }
        generator_ = std::make_unique<SignalGenerator>(parse_signal_spec(text, seed_value));
        spec_key_ = key;
    }
    return *generator_;
}

SampleResult SyntheticSampler::sample(const TickContext& ctx) {
    SignalGenerator& gen = generator_for(ctx.config);
    const auto unit_it = ctx.config.target.find("unit");
    const std::string unit = unit_it != ctx.config.target.end() ? unit_it->second : "";
    const bool fingerprint = ctx.config.param<bool>("fingerprint").value_or(false);
    const std::string fp = fingerprint ? config_fingerprint(ctx.config) : std::string();

    SampleResult out;
    const auto tick = static_cast<std::int64_t>(ctx.tick);
    for (const auto& indicator : ctx.config.indicators) {
        double value = 0.0;
        if (smoothing_ <= 1) {
            value = gen.value(indicator, tick);
        } else {
            auto& history = history_[indicator];
            history[tick] = gen.value(indicator, tick);
            const std::int64_t first = std::max<std::int64_t>(0, tick - smoothing_ + 1);
            while (!history.empty() && history.begin()->first < first) history.erase(history.begin());
            for (std::int64_t t = first; t <= tick; ++t) {
                auto it = history.find(t);
                value += it != history.end() ? it->second : synthetic_value(gen.spec(), indicator, t);
            }
            value /= static_cast<double>(tick - first + 1);
        }
        Sample s{indicator, value, unit, {}};
        if (fingerprint) s.labels["cfg.fingerprint"] = fp;
        out.samples.push_back(std::move(s));
    }
    return out;
}

}  // namespace reprobe
