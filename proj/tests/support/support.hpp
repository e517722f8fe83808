// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprobe/core/types.hpp"
#include "reprobe/lifecycle/bundle.hpp"

#ifndef REPROBE_EXT_COLLECTOR
#define REPROBE_EXT_COLLECTOR ""
#endif
#ifndef REPROBE_EXT_PUBLISHER
#define REPROBE_EXT_PUBLISHER ""
#endif
#ifndef REPROBE_SOURCE_DIR
#define REPROBE_SOURCE_DIR "."
#endif
#ifndef REPROBE_CLI_PATH
#define REPROBE_CLI_PATH ""
#endif

namespace reprobe::testing {

class TempDir {
  public:
    TempDir() {
        static std::atomic<int> n{0};
        path_ = std::filesystem::temp_directory_path() /
                ("reprobe-test-" + std::to_string(::getpid()) + "-" + std::to_string(++n));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool wait_until(const std::function<bool()>& pred,
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        if (pred()) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return pred();
}

inline Observation make_obs(std::string indicator, double value, std::int64_t ts_ns,
                            std::string topic = "sys.cpu", std::string source = "c1") {
    Observation o;
    o.indicator = std::move(indicator);
    o.target = "host-1";
    o.timestamp = from_unix_nanos(ts_ns);
    o.value = value;
    o.unit = "pct";
    o.topic = std::move(topic);
    o.source_instance = std::move(source);
    return o;
}

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len, bool allow_empty) {
    static const std::string alphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-/ \"\\\t\n\xc3\xa9\xe2\x82\xac";
    std::uniform_int_distribution<std::size_t> len(allow_empty ? 0 : 1, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out;
    const std::size_t n = len(rng);
    while (out.size() < n) {
        const std::size_t i = pick(rng);
        const unsigned char c = static_cast<unsigned char>(alphabet[i]);
        if (c >= 0x80) {
            // keep multi-byte sequences whole
            out += c == 0xc3 ? "\xc3\xa9" : "\xe2\x82\xac";
        } else {
            out += alphabet[i];
        }
    }
    return out;
}

inline Observation random_observation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(-1e6, 1e6);
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_int_distribution<std::int64_t> ts(1, 4'000'000'000'000'000'000LL);
    std::uniform_int_distribution<int> nlabels(0, 4);
    Observation o;
    o.indicator = random_text(rng, 16, false);
    o.target = random_text(rng, 12, true);
    o.timestamp = from_unix_nanos(ts(rng));
    switch (kind(rng)) {
        case 0: o.value = 0.0; break;
        case 1: o.value = std::ldexp(mag(rng), -900); break;
        case 2: o.value = std::round(mag(rng)); break;
        case 3: o.value = mag(rng) * 1e250; break;
        default: o.value = mag(rng); break;
    }
    o.unit = random_text(rng, 5, true);
    for (int i = nlabels(rng); i > 0; --i) o.labels[random_text(rng, 8, false)] = random_text(rng, 8, true);
    o.topic = random_text(rng, 10, false);
    o.source_instance = random_text(rng, 10, false);
    return o;
}

inline nlohmann::json external_collector_manifest(const std::string& id) {
    return {{"id", id},
            {"kind", "collector"},
            {"version", "0.1.0"},
            {"entry", "bin/plugin"},
            {"samplers", {"counter"}},
            {"analyzers", {"remote"}},
            {"paramSchema", nlohmann::json::array({{{"name", "gain"}, {"type", "real"}, {"default", 1.0}}})}};
}

inline nlohmann::json external_publisher_manifest(const std::string& id) {
    return {{"id", id},
            {"kind", "publisher"},
            {"version", "0.1.0"},
            {"entry", "bin/plugin"},
            {"paramSchema", nlohmann::json::array({{{"name", "path"}, {"type", "string"}, {"required", true}},
                                                  {{"name", "reject"}, {"type", "bool"}, {"default", false}},
                                                  {{"name", "capacity"}, {"type", "int"}, {"default", 1024}},
                                                  {{"name", "batchSize"}, {"type", "int"}, {"default", 256}}})}};
}

/// A tar bundle holding `manifest` and the given executable as bin/plugin.
inline std::string make_bundle(const nlohmann::json& manifest, const std::string& executable) {
    std::vector<BundleFile> files;
    files.push_back({"manifest.json", manifest.dump(2), 0644});
    files.push_back({"bin/plugin", read_file(executable), 0755});
    return write_tar(files);
}

inline InstanceConfig synthetic_config(std::vector<std::string> indicators, std::chrono::milliseconds period,
                                       std::string topic, std::string signal = "sine:50:40:10:1",
                                       std::string seed = "1", std::string analyzer = "passthrough") {
    InstanceConfig cfg;
    cfg.plugin_id = "synthetic-sampler";
    cfg.indicators = std::move(indicators);
    cfg.sampling_period = period;
    cfg.active_sampler = "synthetic";
    cfg.active_analyzer = std::move(analyzer);
    cfg.topics = {std::move(topic)};
    cfg.target = {{"signal", std::move(signal)}, {"seed", std::move(seed)}};
    return cfg;
}

inline InstanceConfig sink_config(std::string plugin, std::vector<std::string> filter,
                                  std::string param_key = {}, std::string param_value = {}) {
    InstanceConfig cfg;
    cfg.plugin_id = std::move(plugin);
    cfg.topics = std::move(filter);
    if (!param_key.empty()) cfg.params[param_key] = param_value;
    return cfg;
}

}  // namespace reprobe::testing
