// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/plugins/system_sampler.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "reprobe/core/error.hpp"

namespace reprobe {

const std::vector<std::string>& system_indicators() {
    static const std::vector<std::string> kIndicators = {
        "cpu.idle_pct",   "cpu.iowait_pct",   "cpu.user_pct",
        "cpu.system_pct", "cpu.total_pct",    "mem.used_bytes",
        "net.io_rx_packets", "net.io_dropped_packets", "net.io_bytes"};
    return kIndicators;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SamplerFailure, "cannot read " + path.string());
    return in;
}

struct NetTotals {
    double rx_packets = 0, dropped = 0, bytes = 0;
};

NetTotals read_net(const std::filesystem::path& root) {
    auto in = open_or_throw(root / "net" / "dev");
    NetTotals totals;
    std::string line;
    int header = 2;
    while (std::getline(in, line)) {
        if (header-- > 0) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string name = line.substr(0, colon);
        name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
        if (name == "lo") continue;
        std::istringstream fields(line.substr(colon + 1));
        // rx: bytes packets errs drop fifo frame compressed multicast; tx: bytes packets errs drop ...
        double v[16] = {};
        for (double& x : v) fields >> x;
        totals.bytes += v[0] + v[8];
        totals.rx_packets += v[1];
        totals.dropped += v[3] + v[11];
    }
    return totals;
}

double read_mem_used(const std::filesystem::path& root) {
    auto in = open_or_throw(root / "meminfo");
    double total = -1, available = -1;
    std::string key;
    double value = 0;
    std::string unit;
    while (in >> key >> value) {
        std::getline(in, unit);
        if (key == "MemTotal:") total = value;
        if (key == "MemAvailable:") available = value;
    }
    if (total < 0 || available < 0) throw Error(ErrorCode::SamplerFailure, "meminfo lacks MemTotal/MemAvailable");
    return (total - available) * 1024.0;
}

}  // namespace

SystemSampler::CpuTimes SystemSampler::read_cpu() const {
    auto in = open_or_throw(root_ / "stat");
    std::string label;
    CpuTimes t;
    in >> label >> t.user >> t.nice >> t.system >> t.idle >> t.iowait >> t.irq >> t.softirq >> t.steal;
    if (label != "cpu" || !in) throw Error(ErrorCode::SamplerFailure, "unexpected /proc/stat layout");
    return t;
}

std::vector<Sample> SystemSampler::system_sample(const std::vector<std::string>& indicators) {
    const auto& known = system_indicators();
    for (const auto& name : indicators) {
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            throw Error(ErrorCode::UnsupportedIndicator, "unsupported system indicator '" + name + "'");
        }
    }
    auto wants = [&](std::string_view prefix) {
        return std::any_of(indicators.begin(), indicators.end(),
                           [&](const std::string& n) { return n.starts_with(prefix); });
    };

    std::map<std::string, double> values;
    if (wants("cpu.")) {
        const CpuTimes now = read_cpu();
        CpuTimes delta = now;
        if (previous_cpu_ && now.total() > previous_cpu_->total()) {
            const CpuTimes& p = *previous_cpu_;
            delta = CpuTimes{now.user - p.user,     now.nice - p.nice, now.system - p.system,
                             now.idle - p.idle,     now.iowait - p.iowait, now.irq - p.irq,
                             now.softirq - p.softirq, now.steal - p.steal};
        }
        previous_cpu_ = now;
        const double total = std::max<double>(1.0, static_cast<double>(delta.total()));
        auto pct = [&](std::uint64_t part) {
            return std::clamp(100.0 * static_cast<double>(part) / total, 0.0, 100.0);
        };
        values["cpu.idle_pct"] = pct(delta.idle);
        values["cpu.iowait_pct"] = pct(delta.iowait);
        values["cpu.user_pct"] = pct(delta.user + delta.nice);
        values["cpu.system_pct"] = pct(delta.system + delta.irq + delta.softirq);
        values["cpu.total_pct"] = std::clamp(100.0 - values["cpu.idle_pct"] - values["cpu.iowait_pct"], 0.0, 100.0);
    }
    if (wants("mem.")) values["mem.used_bytes"] = read_mem_used(root_);
    if (wants("net.")) {
        const NetTotals net = read_net(root_);
        values["net.io_rx_packets"] = net.rx_packets;
        values["net.io_dropped_packets"] = net.dropped;
        values["net.io_bytes"] = net.bytes;
    }

    std::vector<Sample> out;
    for (const auto& name : indicators) {
        std::string unit = name.ends_with("_pct") ? "percent" : name.ends_with("_bytes") ? "bytes" : "packets";
        out.push_back(Sample{name, values.at(name), std::move(unit), {}});
    }
    return out;
}

}  // namespace reprobe
