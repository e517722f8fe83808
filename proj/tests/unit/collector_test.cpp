// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <atomic>

#include <gtest/gtest.h>

#include "reprobe/collector/collector.hpp"
#include "reprobe/collector/executor.hpp"
#include "reprobe/core/error.hpp"
#include "reprobe/plugins/analyzers.hpp"
#include "reprobe/plugins/builtin.hpp"
#include "reprobe/plugins/sinks.hpp"
#include "support.hpp"

namespace reprobe {
namespace {

const BuiltinPlugin& synthetic_plugin() {
    static const auto plugins = builtin_plugins(std::make_shared<CaptureRegistry>());
    for (const auto& p : plugins) {
        if (p.descriptor.id == kSyntheticCollector) return p;
    }
    throw std::logic_error("no synthetic plugin");
}

struct Rig {
    DataManager bus;
    std::unique_ptr<CollectorRuntime> runtime;
    TimePoint now = from_unix_nanos(1'000'000'000);

    explicit Rig(InstanceConfig cfg, std::unique_ptr<CollectorBackend> backend = nullptr) {
        const auto& plugin = synthetic_plugin();
        cfg = validate_or_throw(cfg, plugin.descriptor, PluginKind::Collector, {}, plugin.extra_check);
        if (!backend) backend = plugin.make_collector("c1", cfg);
        bus.subscribe("tap", TopicFilter({"*"}), 100000);
        CollectorRuntime::Options options;
        options.extra_check = plugin.extra_check;
        runtime = std::make_unique<CollectorRuntime>("c1", plugin.descriptor, cfg, std::move(backend), bus, options);
        runtime->start();
    }
    CollectorRuntime::TickReport tick() {
        auto r = runtime->run_tick(now);
        now += runtime->effective_period();
        return r;
    }
    std::vector<Observation> drain() { return bus.drain("tap", 1000000); }
};

InstanceConfig cfg3(std::string analyzer = "passthrough") {
    return testing::synthetic_config({"cpu.total_pct", "mem.used_pct", "net.io_bytes"}, Duration(100), "sys.host",
                                     "constant:8:42", "1", std::move(analyzer));
}

TEST(CollectorRuntime, PassthroughEmitsOnePerIndicator) {
    Rig rig(cfg3());
    auto r = rig.tick();
    EXPECT_EQ(r.status, CollectorRuntime::TickStatus::Emitted);
    auto out = rig.drain();
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].indicator, "cpu.total_pct");
    EXPECT_EQ(out[1].indicator, "mem.used_pct");
    EXPECT_EQ(out[2].indicator, "net.io_bytes");
    for (const auto& o : out) {
        EXPECT_EQ(o.topic, "sys.host");
        EXPECT_EQ(o.source_instance, "c1");
        EXPECT_EQ(o.value, 42.0);
    }
    auto stats = rig.runtime->stats();
    EXPECT_EQ(stats.max_samplers_per_tick, 1u);
    EXPECT_EQ(stats.max_analyzers_per_tick, 1u);
}

class FailingSampler final : public Sampler {
  public:
    SampleResult sample(const TickContext&) override { throw Error(ErrorCode::SamplerFailure, "target down"); }
};

TEST(CollectorRuntime, FiveConsecutiveFailuresFail) {
    auto backend = std::make_unique<BehaviorSet>();
    backend->add_sampler("synthetic", std::make_unique<FailingSampler>());
    backend->add_analyzer("passthrough", std::make_unique<PassthroughAnalyzer>());
    Rig rig(testing::synthetic_config({"x"}, Duration(100), "t"), std::move(backend));
    for (int i = 0; i < 4; ++i) EXPECT_EQ(rig.tick().status, CollectorRuntime::TickStatus::Skipped);
    EXPECT_EQ(rig.tick().status, CollectorRuntime::TickStatus::Failed);
    EXPECT_EQ(rig.runtime->stats().failures, 5u);
    EXPECT_EQ(rig.runtime->stats().last_error, "target down");
}

TEST(CollectorRuntime, ClampAtMaximumStillAudited) {
    auto cfg = cfg3();
    cfg.sampling_period = Duration(1600);
    Rig rig(cfg);
    rig.runtime->controller_apply(ChangeSource::Analyzer,
                                  AdaptationCommand{SetSamplingPeriod{Duration(3200)}, "adaptive-rate", "stable"});
    EXPECT_EQ(rig.runtime->effective_period(), Duration(1600));
    auto audit = rig.runtime->audit();
    ASSERT_EQ(audit.size(), 1u);
    EXPECT_EQ(audit[0].source, ChangeSource::Analyzer);
    EXPECT_EQ(audit[0].period_before, Duration(1600));
    EXPECT_EQ(audit[0].period_after, Duration(1600));
    EXPECT_EQ(audit[0].reason, "stable");
}

TEST(CollectorRuntime, EffectivePeriodArithmetic) {
    Rig rig(cfg3());
    EXPECT_EQ(rig.runtime->effective_period(), Duration(100));
    AdaptiveRateParams p;
    for (int i = 0; i < 2; ++i) {
        const Duration next = scaled_period(rig.runtime->effective_period(), p, true);
        rig.runtime->controller_apply(ChangeSource::Analyzer, AdaptationCommand{SetSamplingPeriod{next}, "a", ""});
    }
    EXPECT_EQ(rig.runtime->effective_period(), Duration(400));
    rig.runtime->controller_apply(ChangeSource::Analyzer, AdaptationCommand{SetSamplingPeriod{Duration(1)}, "a", ""});
    EXPECT_EQ(rig.runtime->effective_period(), Duration(50));
}

TEST(CollectorRuntime, SwitchToAggregatorResetsWindow) {
    auto cfg = testing::synthetic_config({"x"}, Duration(100), "t", "constant:8:4");
    cfg.params["aggregateWindow"] = std::int64_t{3};
    Rig rig(cfg);
    rig.tick();
    rig.tick();
    rig.drain();
    rig.runtime->controller_apply(ChangeSource::Analyzer, AdaptationCommand{SwitchAnalyzer{"aggregator"}, "passthrough", ""});
    EXPECT_TRUE(rig.runtime->audit().back().self_replacement);
    rig.tick();
    rig.tick();
    EXPECT_TRUE(rig.drain().empty());
    rig.tick();
    auto out = rig.drain();
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].labels.at("agg.count"), "3");
}

TEST(CollectorRuntime, ApiAndAnalyzerChangesApplyInArrivalOrder) {
    Rig rig(cfg3());
    ConfigPatch patch;
    patch.sampling_period = Duration(300);
    patch.active_analyzer = "aggregator";
    rig.runtime->controller_apply(ChangeSource::Api, patch, "operator");
    rig.runtime->controller_apply(ChangeSource::Analyzer, AdaptationCommand{SetSamplingPeriod{Duration(600)}, "a", ""});
    auto cfg = rig.runtime->config();
    EXPECT_EQ(cfg.sampling_period, Duration(600));
    EXPECT_EQ(cfg.active_analyzer, "aggregator");
    auto audit = rig.runtime->audit();
    ASSERT_EQ(audit.size(), 2u);
    EXPECT_EQ(audit[0].source, ChangeSource::Api);
    EXPECT_EQ(audit[0].change, "patch samplingPeriod=300ms, activeAnalyzer=aggregator");
    EXPECT_EQ(audit[1].source, ChangeSource::Analyzer);
}

TEST(CollectorRuntime, RejectedPatchKeepsOldConfig) {
    Rig rig(cfg3());
    const auto before = rig.runtime->config();
    ConfigPatch patch;
    patch.active_sampler = "nonexistent";
    patch.sampling_period = Duration(500);
    try {
        rig.runtime->controller_apply(ChangeSource::Api, patch);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
    EXPECT_EQ(rig.runtime->config(), before);
    EXPECT_FALSE(rig.runtime->audit().back().applied);
    EXPECT_THROW(rig.runtime->controller_apply(ChangeSource::Analyzer,
                                               AdaptationCommand{SwitchSampler{"ghost"}, "a", ""}),
                 Error);
    EXPECT_EQ(rig.runtime->stats().commands_rejected, 1u);
}

TEST(CollectorRuntime, AddedIndicatorAppearsWithinTwoTicks) {
    Rig rig(testing::synthetic_config({"cpu.total_pct"}, Duration(100), "t", "constant:8:1"));
    rig.tick();
    ConfigPatch patch;
    patch.indicators = std::vector<std::string>{"cpu.total_pct", "net.io_bytes"};
    rig.runtime->controller_apply(ChangeSource::Api, patch);
    rig.drain();
    rig.tick();
    rig.tick();
    bool seen = false;
    for (const auto& o : rig.drain()) seen = seen || o.indicator == "net.io_bytes";
    EXPECT_TRUE(seen);
}

TEST(CollectorRuntime, AdaptiveCollectorClimbsOnConstantSignal) {
    Rig rig(testing::synthetic_config({"x"}, Duration(100), "t", "constant:8:5", "1", "adaptive-rate"));
    std::vector<Duration> periods;
    for (int i = 0; i < 64; ++i) {
        rig.tick();
        periods.push_back(rig.runtime->effective_period());
    }
    EXPECT_EQ(periods[6], Duration(100));
    EXPECT_EQ(periods[7], Duration(200));
    EXPECT_EQ(periods[15], Duration(400));
    EXPECT_EQ(periods.back(), Duration(1600));
}

class CountingWorker final : public Worker {
  public:
    CountingWorker(Duration delay, int limit) : delay_(delay), limit_(limit) {}
    Duration next_delay() const override { return delay_; }
    bool step(TimePoint now) override {
        times.push_back(now);
        return static_cast<int>(times.size()) < limit_;
    }
    std::vector<TimePoint> times;

  private:
    Duration delay_;
    int limit_;
};

TEST(VirtualExecutor, FixedDelayAndOrdering) {
    VirtualExecutor ex;
    const auto start = ex.clock().now();
    auto a = std::make_shared<CountingWorker>(Duration(100), 1000);
    auto b = std::make_shared<CountingWorker>(Duration(250), 3);
    ex.attach("a", a);
    ex.attach("b", b);
    ex.advance(std::chrono::seconds(1));
    ASSERT_EQ(a->times.size(), 11u);
    EXPECT_EQ(a->times[0], start);
    EXPECT_EQ(a->times[10] - start, std::chrono::seconds(1));
    ASSERT_EQ(b->times.size(), 3u);
    EXPECT_EQ(b->times[2] - start, std::chrono::milliseconds(500));
    EXPECT_EQ(ex.size(), 1u);
    ex.detach("a");
    ex.advance(std::chrono::seconds(1));
    EXPECT_EQ(a->times.size(), 11u);
}

class AtomicWorker final : public Worker {
  public:
    Duration next_delay() const override { return Duration(10); }
    bool step(TimePoint) override {
        ++steps;
        return true;
    }
    std::atomic<int> steps{0};
};

TEST(ThreadExecutor, RunsAndDetaches) {
    ThreadExecutor ex;
    auto w = std::make_shared<AtomicWorker>();
    ex.attach("w", w);
    ASSERT_TRUE(testing::wait_until([&] { return w->steps >= 5; }));
    ex.detach("w");
    const int n = w->steps;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    EXPECT_EQ(w->steps, n);
}

}  // namespace
}  // namespace reprobe
