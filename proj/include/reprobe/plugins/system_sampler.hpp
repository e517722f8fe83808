// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reprobe/collector/collector.hpp"

namespace reprobe {

/// The indicator names system_sample() understands.
const std::vector<std::string>& system_indicators();

/// Best-effort host readings from procfs. CPU percentages are computed over the
/// interval since the previous call (since boot on the first call); network
/// counters are cumulative over all interfaces except loopback.
class SystemSampler final : public Sampler {
  public:
    explicit SystemSampler(std::filesystem::path proc_root = "/proc") : root_(std::move(proc_root)) {}

    /// Throws Error(UnsupportedIndicator) for names outside system_indicators().
    std::vector<Sample> system_sample(const std::vector<std::string>& indicators);

    SampleResult sample(const TickContext& ctx) override {
        return SampleResult{system_sample(ctx.config.indicators), {}};
    }
    void reset() override { previous_cpu_.reset(); }

  private:
    struct CpuTimes {
        std::uint64_t user = 0, nice = 0, system = 0, idle = 0, iowait = 0, irq = 0, softirq = 0,
                      steal = 0;
        std::uint64_t total() const { return user + nice + system + idle + iowait + irq + softirq + steal; }
    };
    CpuTimes read_cpu() const;

    std::filesystem::path root_;
    std::optional<CpuTimes> previous_cpu_;
};

}  // namespace reprobe
