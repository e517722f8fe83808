// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "reprobe/harness/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Runs the reconfiguration scenarios and prints their reports"};
    bool wall = false;
    bool negative = false;
    app.add_flag("--wall", wall, "run the data-center scenario on the wall clock");
    app.add_flag("--negative-controls", negative, "also run the deliberately broken variants");
    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::warn);

    using namespace reprobe;
    DatacenterOptions dc;
    dc.mode = wall ? TimeMode::Wall : TimeMode::Virtual;
    nlohmann::json out = nlohmann::json::array();
    const auto s1 = run_scenario_datacenter(dc);
    const auto s2 = run_scenario_adaptive();
    out.push_back(report_to_json(s1));
    out.push_back(report_to_json(s2));
    bool ok = s1.verdict == Verdict::ApiDriven && s2.verdict == Verdict::SelfAdaptive;
    if (negative) {
        dc.restart_agent = true;
        const auto n1 = run_scenario_datacenter(dc);
        AdaptiveOptions passive;
        passive.adaptive = false;
        const auto n2 = run_scenario_adaptive(passive);
        out.push_back(report_to_json(n1));
        out.push_back(report_to_json(n2));
        ok = ok && n1.verdict != Verdict::ApiDriven && n2.verdict != Verdict::SelfAdaptive;
    }
    std::cout << out.dump(2) << std::endl;
    return ok ? 0 : 1;
}
