// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/plugins/builtin.hpp"

#include "reprobe/core/error.hpp"
#include "reprobe/plugins/analyzers.hpp"
#include "reprobe/plugins/signal.hpp"
#include "reprobe/plugins/system_sampler.hpp"

namespace reprobe {

namespace {

constexpr const char* kVersion = "1.0.0";

ParamSpec param(std::string name, ParamType type, std::optional<Scalar> def,
                std::optional<double> min = std::nullopt, std::string description = {}) {
    ParamSpec spec;
    spec.name = std::move(name);
    spec.type = type;
    spec.default_value = std::move(def);
    spec.min = min;
    spec.description = std::move(description);
    return spec;
}

ParamSpec required(std::string name, ParamType type, std::string description) {
    ParamSpec spec;
    spec.name = std::move(name);
    spec.type = type;
    spec.required = true;
    spec.description = std::move(description);
    return spec;
}

PluginDescriptor collector_descriptor(std::string id, std::vector<std::string> samplers,
                                      std::vector<std::string> indicators, std::string description) {
    PluginDescriptor d;
    d.id = std::move(id);
    d.kind = PluginKind::Collector;
    d.provenance = Provenance::Builtin;
    d.version = kVersion;
    d.params = analyzer_params();
    d.samplers = std::move(samplers);
    d.analyzers = {"passthrough", "aggregator", "adaptive-rate"};
    d.indicators = std::move(indicators);
    d.description = std::move(description);
    return d;
}

PluginDescriptor publisher_descriptor(std::string id, std::vector<ParamSpec> params,
                                      std::string description) {
    PluginDescriptor d;
    d.id = std::move(id);
    d.kind = PluginKind::Publisher;
    d.provenance = Provenance::Builtin;
    d.version = kVersion;
    d.params = std::move(params);
    for (auto& p : publisher_common_params()) d.params.push_back(std::move(p));
    d.description = std::move(description);
    return d;
}

void check_synthetic_target(const InstanceConfig& cfg, std::vector<Violation>& out) {
    std::uint64_t seed = 0;
    if (auto it = cfg.target.find("seed"); it != cfg.target.end()) {
        try {
            std::size_t used = 0;
            seed = std::stoull(it->second, &used);
            if (used != it->second.size() || it->second.front() == '-') throw std::invalid_argument("");
        } catch (const std::exception&) {
            out.push_back({ErrorCode::TypeMismatch, "target.seed", "expected an unsigned integer"});
        }
    }
    if (auto it = cfg.target.find("signal"); it != cfg.target.end()) {
        try {
            parse_signal_spec(it->second, seed);
        } catch (const Error& e) {
            out.push_back({ErrorCode::InvalidConfig, "target.signal", e.what()});
        }
    }
}

}  // namespace

std::vector<ParamSpec> publisher_common_params() {
    return {
        param("capacity", ParamType::Int, Scalar(std::int64_t{1024}), 1, "subscription queue bound"),
        param("batchSize", ParamType::Int, Scalar(std::int64_t{256}), 1, "max observations per sink call"),
    };
}

std::vector<ParamSpec> analyzer_params() {
    return {
        param("windowSize", ParamType::Int, Scalar(std::int64_t{8}), 2, "adaptive-rate window length"),
        param("lowThreshold", ParamType::Real, Scalar(0.05), 0.0, "stable below this score"),
        param("highThreshold", ParamType::Real, Scalar(0.25), 0.0, "unstable above this score"),
        param("factor", ParamType::Real, Scalar(2.0), 1.0, "period multiplier"),
        param("minPeriod", ParamType::Duration, Scalar(Duration(50)), 1.0, "lower period clamp"),
        param("maxPeriod", ParamType::Duration, Scalar(Duration(1600)), 1.0, "upper period clamp"),
        param("epsilon", ParamType::Real, Scalar(1e-9), 0.0, "mean magnitude floor"),
        param("aggregateWindow", ParamType::Int, Scalar(std::int64_t{5}), 1, "aggregator window length"),
        param("fingerprint", ParamType::Bool, Scalar(false), std::nullopt,
              "label samples with the config tuple in force"),
    };
}

void check_analyzer_params(const InstanceConfig& cfg, std::vector<Violation>& out) {
    const auto p = AdaptiveRateParams::from_config(cfg);
    if (!(p.low_threshold > 0.0)) {
        out.push_back({ErrorCode::ConstraintViolated, "params.lowThreshold", "must be > 0"});
    }
    if (!(p.high_threshold > p.low_threshold)) {
        out.push_back({ErrorCode::ConstraintViolated, "params.highThreshold",
                       "must be greater than lowThreshold"});
    }
    if (!(p.factor > 1.0)) {
        out.push_back({ErrorCode::ConstraintViolated, "params.factor", "must be > 1"});
    }
    if (!(p.min_period < p.max_period)) {
        out.push_back({ErrorCode::ConstraintViolated, "params.maxPeriod",
                       "minPeriod must be less than maxPeriod"});
    }
}

void add_builtin_analyzers(BehaviorSet& set) {
    set.add_analyzer("passthrough", std::make_unique<PassthroughAnalyzer>());
    set.add_analyzer("aggregator", std::make_unique<AggregatorAnalyzer>());
    set.add_analyzer("adaptive-rate", std::make_unique<AdaptiveRateAnalyzer>("adaptive-rate"));
}

std::vector<BuiltinPlugin> builtin_plugins(std::shared_ptr<CaptureRegistry> captures) {
    std::vector<BuiltinPlugin> out;

    BuiltinPlugin synthetic;
    synthetic.descriptor = collector_descriptor(
        kSyntheticCollector, {"synthetic", "synthetic-smoothed"}, {},
        "Deterministic synthetic target; target keys signal, seed, unit, name");
    synthetic.extra_check = [](const InstanceConfig& cfg, std::vector<Violation>& v) {
        check_analyzer_params(cfg, v);
        check_synthetic_target(cfg, v);
    };
    synthetic.make_collector = [](const std::string&, const InstanceConfig&) {
        auto set = std::make_unique<BehaviorSet>();
        set->add_sampler("synthetic", std::make_unique<SyntheticSampler>(1));
        set->add_sampler("synthetic-smoothed", std::make_unique<SyntheticSampler>(3));
        add_builtin_analyzers(*set);
        return std::unique_ptr<CollectorBackend>(std::move(set));
    };
    out.push_back(std::move(synthetic));

    BuiltinPlugin system;
    system.descriptor = collector_descriptor(kSystemCollector, {"procfs"}, system_indicators(),
                                             "Host CPU, memory and network readings from procfs");
    system.extra_check = check_analyzer_params;
    system.make_collector = [](const std::string&, const InstanceConfig&) {
        auto set = std::make_unique<BehaviorSet>();
        set->add_sampler("procfs", std::make_unique<SystemSampler>());
        add_builtin_analyzers(*set);
        return std::unique_ptr<CollectorBackend>(std::move(set));
    };
    out.push_back(std::move(system));

    BuiltinPlugin file;
    file.descriptor = publisher_descriptor(
        kFileSink, {required("path", ParamType::String, "file to append NDJSON lines to")},
        "Appends canonical NDJSON lines to a local file");
    file.make_sink = [](const std::string&, const InstanceConfig&) {
        return std::unique_ptr<Sink>(std::make_unique<FileSink>());
    };
    out.push_back(std::move(file));

    BuiltinPlugin http;
    http.descriptor = publisher_descriptor(
        kHttpSink,
        {required("url", ParamType::String, "ingestion endpoint, http://host:port/path"),
         param("retries", ParamType::Int, Scalar(std::int64_t{2}), 0, "retries on 5xx or connection error"),
         param("backoff", ParamType::Duration, Scalar(Duration(250)), 0, "delay between attempts"),
         param("timeout", ParamType::Duration, Scalar(Duration(2000)), 1, "per-request timeout")},
        "POSTs NDJSON batches to an HTTP ingestion service");
    http.make_sink = [](const std::string&, const InstanceConfig&) {
        return std::unique_ptr<Sink>(std::make_unique<HttpSink>());
    };
    out.push_back(std::move(http));

    BuiltinPlugin capture;
    capture.descriptor = publisher_descriptor(kCaptureSink, {}, "Keeps published records in memory");
    capture.make_sink = [captures](const std::string& instance_id, const InstanceConfig&) {
        return std::unique_ptr<Sink>(std::make_unique<CaptureSink>(captures->open(instance_id)));
    };
    out.push_back(std::move(capture));

    return out;
}

}  // namespace reprobe
