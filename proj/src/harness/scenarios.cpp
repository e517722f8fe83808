// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "reprobe/api/client.hpp"
#include "reprobe/cli/cli.hpp"
#include "reprobe/core/duration.hpp"
#include "reprobe/core/error.hpp"
#include "reprobe/harness/harness.hpp"

namespace reprobe {

using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::filesystem::path& requested, const std::string& tag) {
    static std::atomic<std::uint64_t> counter{0};
    auto dir = requested.empty()
                   ? std::filesystem::temp_directory_path() /
                         fmt::format("reprobe-{}-{}-{}", tag, ::getpid(), ++counter)
                   : requested;
    std::filesystem::create_directories(dir);
    return dir;
}

/// The harness's only handle on the agent: the management API, plus control
/// of time itself in virtual mode.
class ScenarioApi {
  public:
    explicit ScenarioApi(TimeMode mode) : mode_(mode) { boot(); }

    ApiResult call(const std::string& method, const std::string& path, const json& body = nullptr) {
        ++calls_;
        const std::string text = body.is_null() ? std::string() : body.dump();
        if (mode_ == TimeMode::Virtual) {
            const HttpResponse r = router_->handle(HttpRequest{method, path, {}, text});
            return ApiResult{r.status, r.body};
        }
        return client_->request(method, path, text);
    }

    /// Lets time pass: virtual time is advanced, wall time is slept.
    void wait(Duration d) {
        if (mode_ == TimeMode::Virtual) {
            agent_->virtual_executor()->advance(d);
        } else {
            std::this_thread::sleep_for(d);
        }
    }

    /// Kills the agent and starts a fresh one (negative control only).
    void restart() {
        session_.reset();
        router_.reset();
        agent_.reset();
        boot();
    }

    int calls() const { return calls_; }

  private:
    void boot() {
        if (mode_ == TimeMode::Virtual) {
            AgentOptions options;
            options.mode = TimeMode::Virtual;
            agent_ = std::make_unique<Agent>(options);
            router_ = std::make_unique<ApiRouter>(*agent_, ApiOptions{});
        } else {
            ServeConfig config;
            config.bind = "127.0.0.1:0";
            session_ = std::make_unique<ServeSession>(config);
            client_ = std::make_unique<ApiClient>(session_->endpoint());
        }
    }

    TimeMode mode_;
    std::unique_ptr<Agent> agent_;
    std::unique_ptr<ApiRouter> router_;
    std::unique_ptr<ServeSession> session_;
    std::unique_ptr<ApiClient> client_;
    int calls_ = 0;
};

json collector_body(const std::string& id, const std::vector<std::string>& indicators, Duration period,
                    const std::string& topic, const std::string& signal, std::uint64_t seed,
                    const std::string& analyzer = "passthrough") {
    return json{{"id", id},
                {"pluginId", "synthetic-sampler"},
                {"indicators", indicators},
                {"samplingPeriod", format_duration(period)},
                {"activeAnalyzer", analyzer},
                {"topics", {topic}},
                {"target", {{"signal", signal}, {"seed", std::to_string(seed)}, {"name", id}}}};
}

json file_publisher_body(const std::string& id, const std::filesystem::path& path,
                         const std::vector<std::string>& filter) {
    return json{{"id", id}, {"pluginId", "file-sink"}, {"topics", filter}, {"params", {{"path", path.string()}}}};
}

void expect_status(const ApiResult& r, int status, const std::string& what, std::vector<std::string>& failures) {
    if (r.status != status) failures.push_back(fmt::format("{}: HTTP {} {}", what, r.status, r.body));
}

struct UptimeProbe {
    std::string incarnation;
    std::string started_at;
    std::int64_t uptime_ms = -1;
};

UptimeProbe probe_uptime(ScenarioApi& api) {
    const ApiResult r = api.call("GET", "/api/v1/status");
    UptimeProbe p;
    const json body = r.json();
    if (!r.ok() || !body.is_object()) return p;
    p.incarnation = body.value("incarnation", "");
    p.started_at = body.value("startedAt", "");
    p.uptime_ms = body.value("uptimeMs", std::int64_t{-1});
    return p;
}

}  // namespace

ScenarioReport run_scenario_datacenter(const DatacenterOptions& options) {
    ScenarioReport report;
    report.scenario_id = "S1-new-datacenter";
    const auto dir = scratch_dir(options.work_dir, "s1");
    const auto sink_path = dir / "ingest.ndjson";
    std::filesystem::remove(sink_path);

    ScenarioApi api(options.mode);
    const std::vector<std::string> baseline_ids = {"dc-east", "dc-west"};
    const std::vector<std::string> system_indicators = {"cpu.total_pct", "net.io_bytes"};
    const std::vector<std::string> slo_indicators = {"slo.latency_ms", "slo.availability_pct"};

    auto baseline = [&](ScenarioStep& step) {
        auto r = api.call("POST", "/api/v1/publishers", file_publisher_body("ingest", sink_path, {"dc.*"}));
        expect_status(r, 201, "create publisher", report.failures);
        std::uint64_t seed = 11;
        for (const auto& id : baseline_ids) {
            r = api.call("POST", "/api/v1/collectors",
                         collector_body(id, system_indicators, options.baseline_period, "dc." + id.substr(3),
                                        "sine:50:40:10:1", seed++));
            expect_status(r, 201, "create " + id, report.failures);
        }
        step.api_calls += 3;
    };

    ScenarioStep setup{"baseline topology for the existing data centers (2 collectors, 1 publisher)", 0, 0};
    baseline(setup);
    report.steps.push_back(setup);
    const int calls_at_setup = api.calls();

    const UptimeProbe before = probe_uptime(api);
    api.wait(options.phase);

    ScenarioStep add{"instantiate a collector with the SLO indicators of the new data center", 1, 0};
    auto r = api.call("POST", "/api/v1/collectors",
                      collector_body("dc-new", slo_indicators, options.baseline_period, "dc.new",
                                     "randomWalk:100:99:0.1:0.5", 99));
    expect_status(r, 201, "create dc-new", report.failures);
    report.steps.push_back(add);
    api.wait(options.phase);

    if (options.restart_agent) {
        ScenarioStep restart{"restart the agent and rebuild its topology", 0, 1};
        api.restart();
        baseline(restart);
        r = api.call("POST", "/api/v1/collectors",
                     collector_body("dc-new", slo_indicators, options.baseline_period, "dc.new",
                                    "randomWalk:100:99:0.1:0.5", 99));
        ++restart.api_calls;
        report.steps.push_back(restart);
        api.wait(options.phase);
    }

    ScenarioStep patch{"update the sampling period of the already collected indicators", 0, 0};
    for (const auto& id : baseline_ids) {
        r = api.call("PATCH", "/api/v1/collectors/" + id + "/config",
                     json{{"samplingPeriod", format_duration(options.patched_period)}});
        expect_status(r, 200, "patch " + id, report.failures);
        ++patch.api_calls;
    }
    report.steps.push_back(patch);
    api.wait(options.phase);

    const UptimeProbe after = probe_uptime(api);
    report.uptime_uninterrupted = before.uptime_ms >= 0 && after.uptime_ms >= before.uptime_ms &&
                                  before.incarnation == after.incarnation &&
                                  before.started_at == after.started_at;
    if (!report.uptime_uninterrupted) {
        report.failures.push_back(fmt::format("agent uptime was interrupted ({} {}ms -> {} {}ms)", before.started_at,
                                              before.uptime_ms, after.started_at, after.uptime_ms));
    }

    ScenarioStep teardown{"flush the ingestion sink", 1, 0};
    r = api.call("DELETE", "/api/v1/publishers/ingest");
    expect_status(r, 204, "destroy publisher", report.failures);
    report.steps.push_back(teardown);
    report.api_calls_after_setup = api.calls() - calls_at_setup;

    const auto records = read_sink_file(sink_path);
    std::set<std::string> seen_slo;
    for (const auto& o : records) {
        if (o.source_instance == "dc-new") seen_slo.insert(o.indicator);
    }
    for (const auto& ind : slo_indicators) {
        if (!seen_slo.contains(ind)) report.failures.push_back("new data center indicator '" + ind + "' never arrived");
    }
    try {
        const auto gaps = measure_gaps(records);
        const double budget_ms = 3.0 * static_cast<double>(options.baseline_period.count());
        for (const auto& id : baseline_ids) {
            double worst = 0.0;
            for (const auto& ind : system_indicators) {
                auto it = gaps.find({id, ind});
                if (it == gaps.end()) continue;
                worst = std::max(worst, std::chrono::duration<double, std::milli>(it->second.max).count());
            }
            report.max_gap_ms[id] = worst;
            if (worst > budget_ms || worst <= 0.0) {
                report.failures.push_back(fmt::format("{}: max gap {:.1f}ms exceeds {:.0f}ms", id, worst, budget_ms));
            }
        }
    } catch (const Error& e) {
        report.failures.push_back(e.what());
    }

    if (report.manual_steps() > 0) {
        report.verdict = Verdict::Manual;
    } else if (report.failures.empty()) {
        report.verdict = Verdict::ApiDriven;
    } else {
        report.verdict = Verdict::Partially;
    }
    if (options.work_dir.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    return report;
}

ScenarioReport run_scenario_adaptive(const AdaptiveOptions& options) {
    ScenarioReport report;
    report.scenario_id = "S2-adaptive-sampling";
    const auto dir = scratch_dir(options.work_dir, "s2");
    const auto sink_path = dir / "trend.ndjson";
    std::filesystem::remove(sink_path);

    ScenarioApi api(TimeMode::Virtual);
    const std::string id = "trend";
    const std::vector<std::string> indicators = {"cpu.total_pct", "net.io_rx_packets"};
    const std::int64_t seg = options.segment_ticks;
    // Segment A: perfectly stable. Segment B: a noisy random walk.
    const std::string signal = fmt::format("constant:{}:42;randomWalk:{}:100:1:60", seg, seg);

    ScenarioStep setup{"create an adaptive collector and a file publisher", 2, 0};
    auto r = api.call("POST", "/api/v1/publishers", file_publisher_body("trend-sink", sink_path, {"trend"}));
    expect_status(r, 201, "create publisher", report.failures);
    r = api.call("POST", "/api/v1/collectors",
                 collector_body(id, indicators, options.initial_period, "trend", signal, options.seed,
                                options.adaptive ? "adaptive-rate" : "passthrough"));
    expect_status(r, 201, "create collector", report.failures);
    report.steps.push_back(setup);
    const int calls_at_setup = api.calls();

    // Let virtual time run until both segments have been sampled.
    const auto wanted_ticks = static_cast<std::size_t>(2 * seg + 1);
    std::vector<Observation> records;
    for (int second = 0; second < 4 * 3600; ++second) {
        api.wait(Duration(1000));
        records = read_sink_file(sink_path);
        std::set<std::int64_t> ticks;
        for (const auto& o : records) {
            if (o.source_instance == id) ticks.insert(to_unix_nanos(o.timestamp));
        }
        if (ticks.size() >= wanted_ticks) break;
    }
    report.steps.push_back(ScenarioStep{"observe the collector adapt on its own", 0, 0});
    report.api_calls_after_setup = api.calls() - calls_at_setup;
    report.uptime_uninterrupted = true;

    auto trajectory = trajectory_from_records(records, id);
    if (trajectory.size() > static_cast<std::size_t>(2 * seg)) trajectory.resize(static_cast<std::size_t>(2 * seg));
    report.trajectory = trajectory;

    const AdaptiveRateParams params;  // the collector runs with the defaults
    auto oracle = replay_adaptive(records, id, indicators, params, options.initial_period);
    if (!options.adaptive) {
        oracle.assign(oracle.size(), TrajectoryPoint{});
        for (std::size_t i = 0; i < oracle.size(); ++i) oracle[i] = TrajectoryPoint{i, options.initial_period.count()};
    }
    oracle.resize(std::min(oracle.size(), trajectory.size()));

    if (trajectory.size() < static_cast<std::size_t>(2 * seg)) {
        report.failures.push_back(fmt::format("only {} ticks observed, wanted {}", trajectory.size(), 2 * seg));
    }
    if (trajectory != oracle) {
        report.failures.push_back("measured trajectory differs from the offline replay");
    }
    auto reached = [&](std::int64_t from, std::int64_t to, std::int64_t period) {
        for (const auto& p : trajectory) {
            if (static_cast<std::int64_t>(p.tick) >= from && static_cast<std::int64_t>(p.tick) < to &&
                p.period_ms == period) {
                return true;
            }
        }
        return false;
    };
    if (!reached(0, seg, params.max_period.count())) {
        report.failures.push_back(fmt::format("period never reached {}ms on the stable segment",
                                              params.max_period.count()));
    }
    if (!reached(seg, 2 * seg, params.min_period.count())) {
        report.failures.push_back(fmt::format("period never reached {}ms on the unstable segment",
                                              params.min_period.count()));
    }
    if (report.api_calls_after_setup != 0) report.failures.push_back("API calls were needed after setup");

    report.verdict = report.failures.empty() ? Verdict::SelfAdaptive : Verdict::Manual;
    if (options.work_dir.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    return report;
}

}  // namespace reprobe
