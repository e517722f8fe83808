// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <signal.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "reprobe/cli/cli.hpp"
#include "reprobe/core/duration.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

using nlohmann::json;

namespace {

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Globals {
    std::string endpoint;
    std::optional<std::string> token;
    bool json_output = false;
};

/// Prints the response and maps it to the exit-code contract.
int render(const ApiResult& result, const Globals& g, std::ostream& out, std::ostream& err,
           const std::function<void(const json&)>& human) {
    const json body = result.json();
    if (result.ok()) {
        if (g.json_output) {
            if (!result.body.empty()) out << result.body << "\n";
        } else {
            human(body);
        }
        return 0;
    }
    if (g.json_output) {
        err << result.body << "\n";
    } else if (body.is_object() && body.contains("code")) {
        err << "error: " << body.value("code", "") << ": " << body.value("message", "") << "\n";
        if (body.contains("details")) {
            for (const auto& d : body["details"]) {
                err << "  " << d.value("field", "") << ": " << d.value("code", "") << ": "
                    << d.value("message", "") << "\n";
            }
        }
    } else {
        err << "error: HTTP " << result.status << "\n";
    }
    return 1;
}

void print_records(const json& list, std::ostream& out) {
    out << fmt::format("{:<16} {:<20} {:<14} {}\n", "ID", "PLUGIN", "STATE", "LAST ERROR");
    for (const auto& r : list) {
        const std::string error = r["lastError"].is_string() ? r["lastError"].get<std::string>() : "";
        out << fmt::format("{:<16} {:<20} {:<14} {}\n", r.value("id", ""), r.value("pluginId", ""),
                           r.value("state", ""), error);
    }
}

void print_plugins(const json& list, std::ostream& out) {
    out << fmt::format("{:<22} {:<10} {:<9} {}\n", "ID", "KIND", "ORIGIN", "VERSION");
    for (const auto& p : list) {
        out << fmt::format("{:<22} {:<10} {:<9} {}\n", p.value("id", ""), p.value("kind", ""),
                           p.value("provenance", ""), p.value("version", ""));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::BadRequest, "cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int cmd_watch(ApiClient& client, const Globals& g, const std::string& id, Duration duration,
              Duration interval, std::ostream& out, std::ostream& err) {
    const auto path = "/api/v1/collectors/" + id;
    const auto start = std::chrono::steady_clock::now();
    if (!g.json_output) {
        out << fmt::format("{:<10} {:<10} {:<34} {}\n", "ELAPSED", "PERIOD", "LAST CHANGE", "REASON");
    }
    for (;;) {
        const ApiResult result = client.get(path);
        if (!result.ok()) return render(result, g, out, err, [](const json&) {});
        const json body = result.json();
        const auto elapsed = std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - start);
        std::string change = "-", reason = "-";
        if (body.contains("audit") && body["audit"].is_array() && !body["audit"].empty()) {
            const auto& last = body["audit"].back();
            change = last.value("change", "-");
            reason = last.value("reason", "-");
        }
        const std::string period = body.value("effectivePeriod", body["config"].value("samplingPeriod", "?"));
        if (g.json_output) {
            out << json{{"elapsedMs", elapsed.count()}, {"period", period}, {"lastChange", change}, {"reason", reason}}.dump()
                << "\n";
        } else {
            out << fmt::format("{:<10} {:<10} {:<34} {}\n", format_duration(elapsed), period, change, reason);
        }
        out.flush();
        if (elapsed + interval > duration) return 0;
        std::this_thread::sleep_for(interval);
    }
}

int cmd_serve(const std::string& config_path, std::ostream& out, std::ostream& err) {
    ServeConfig config;
    try {
        config = load_serve_config(config_path);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": invalid config " << config_path << "\n";
        for (const auto& v : e.details()) err << "  " << v.field << ": " << to_string(v.code) << ": " << v.message << "\n";
        return 1;
    }
    if (const char* env = std::getenv("REPROBE_TOKEN"); env != nullptr && *env != '\0') config.auth_token = env;

    // Block termination signals before any thread starts, then wait for them here.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);
    struct MaskGuard {
        sigset_t mask;
        ~MaskGuard() { pthread_sigmask(SIG_SETMASK, &mask, nullptr); }
    } restore{previous};

    std::unique_ptr<ServeSession> session;
    try {
        session = std::make_unique<ServeSession>(config);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        for (const auto& v : e.details()) err << "  " << v.field << ": " << to_string(v.code) << ": " << v.message << "\n";
        return 1;
    }
    out << "reprobe agent " << kAgentVersion << " listening on " << session->endpoint() << "\n";
    out.flush();
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {} received, shutting down", sig);
    session.reset();
    return 0;
}

}  // namespace

json assignments_to_patch(const std::vector<std::string>& assignments) {
    json patch = json::object();
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorCode::BadRequest, "expected key=value, got '" + a + "'");
        }
        std::string key = a.substr(0, eq);
        const std::string value = a.substr(eq + 1);
        if (key == "samplingPeriod" || key == "activeSampler" || key == "activeAnalyzer") {
            patch[key] = value;
        } else if (key == "indicators" || key == "topics") {
            patch[key] = split_commas(value);
        } else {
            if (key.starts_with("params.")) key = key.substr(7);
            json parsed = json::parse(value, nullptr, false);
            if (parsed.is_discarded() || parsed.is_structured()) parsed = value;
            patch["params"][key] = parsed;
        }
    }
    return patch;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"reprobe: reconfigurable monitoring probe"};
    app.require_subcommand(1);
    Globals g;
    g.endpoint = "127.0.0.1:7700";
    if (const char* env = std::getenv("REPROBE_ENDPOINT"); env != nullptr && *env != '\0') g.endpoint = env;
    std::string token;
    app.add_option("--endpoint", g.endpoint, "agent address host:port");
    app.add_option("--token", token, "bearer token (default: $REPROBE_TOKEN)");
    app.add_flag("--json", g.json_output, "print raw response bodies");

    std::string config_path;
    auto* serve = app.add_subcommand("serve", "run the agent");
    serve->add_option("-c,--config", config_path, "agent config file")->required();

    auto* status = app.add_subcommand("status", "agent status");

    auto* plugin = app.add_subcommand("plugin", "manage plugins");
    plugin->require_subcommand(1);
    auto* plugin_ls = plugin->add_subcommand("ls", "list plugins");
    std::string bundle_path, plugin_id;
    auto* plugin_upload = plugin->add_subcommand("upload", "upload a plugin bundle");
    plugin_upload->add_option("bundle", bundle_path, "tar bundle")->required();
    auto* plugin_rm = plugin->add_subcommand("rm", "remove a plugin");
    plugin_rm->add_option("id", plugin_id)->required();

    struct KindCommands {
        CLI::App* root;
        CLI::App* ls;
        CLI::App* create;
        CLI::App* set;
        CLI::App* rm;
        std::string file;
        std::string id;
        std::vector<std::string> assignments;
        const char* collection;
    };
    KindCommands kinds[2];
    const std::pair<const char*, const char*> names[2] = {{"col", "collectors"}, {"pub", "publishers"}};
    for (int i = 0; i < 2; ++i) {
        auto& k = kinds[i];
        k.collection = names[i].second;
        k.root = app.add_subcommand(names[i].first, std::string("manage ") + names[i].second);
        k.root->require_subcommand(1);
        k.ls = k.root->add_subcommand("ls", "list instances");
        k.create = k.root->add_subcommand("create", "create an instance");
        k.create->add_option("-f,--file", k.file, "instance config JSON")->required();
        k.set = k.root->add_subcommand("set", "patch an instance config");
        k.set->add_option("id", k.id)->required();
        k.set->add_option("assignments", k.assignments, "key=value ...")->required();
        k.rm = k.root->add_subcommand("rm", "destroy an instance");
        k.rm->add_option("id", k.id)->required();
    }

    std::string watch_id, watch_duration = "10s", watch_interval = "1s";
    auto* watch = app.add_subcommand("watch", "follow a collector's adaptation");
    watch->add_option("id", watch_id)->required();
    watch->add_option("--duration", watch_duration, "how long to watch");
    watch->add_option("--interval", watch_interval, "poll interval");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    if (serve->parsed()) return cmd_serve(config_path, out, err);

    if (!token.empty()) {
        g.token = token;
    } else if (const char* env = std::getenv("REPROBE_TOKEN"); env != nullptr && *env != '\0') {
        g.token = env;
    }

    try {
        ApiClient client(g.endpoint, g.token);
        if (status->parsed()) {
            return render(client.get("/api/v1/status"), g, out, err, [&](const json& s) {
                out << "agent " << s.value("agentVersion", "") << ", up " << s.value("uptimeMs", 0) << "ms\n";
                out << "plugins: " << s["plugins"].dump() << "\n";
                out << "collectors: " << s["instances"]["collectors"].dump() << "\n";
                out << "publishers: " << s["instances"]["publishers"].dump() << "\n";
            });
        }
        if (plugin_ls->parsed()) {
            return render(client.get("/api/v1/plugins"), g, out, err, [&](const json& l) { print_plugins(l, out); });
        }
        if (plugin_upload->parsed()) {
            return render(client.request("POST", "/api/v1/plugins", read_file(bundle_path), "application/x-tar"),
                          g, out, err, [&](const json& d) {
                              out << "registered " << d.value("kind", "") << " plugin " << d.value("id", "") << " "
                                  << d.value("version", "") << "\n";
                          });
        }
        if (plugin_rm->parsed()) {
            return render(client.del("/api/v1/plugins/" + plugin_id), g, out, err,
                          [&](const json&) { out << "removed " << plugin_id << "\n"; });
        }
        for (auto& k : kinds) {
            const std::string base = std::string("/api/v1/") + k.collection;
            if (k.ls->parsed()) {
                return render(client.get(base), g, out, err, [&](const json& l) { print_records(l, out); });
            }
            if (k.create->parsed()) {
                json body = json::parse(read_file(k.file), nullptr, false);
                if (body.is_discarded()) {
                    err << "error: " << k.file << " is not valid JSON\n";
                    return 1;
                }
                return render(client.post_json(base, body), g, out, err, [&](const json& r) {
                    out << "created " << r.value("id", "") << " (" << r.value("state", "") << ")\n";
                });
            }
            if (k.set->parsed()) {
                return render(client.patch_json(base + "/" + k.id + "/config", assignments_to_patch(k.assignments)),
                              g, out, err, [&](const json& c) { out << c.dump(2) << "\n"; });
            }
            if (k.rm->parsed()) {
                return render(client.del(base + "/" + k.id), g, out, err,
                              [&](const json&) { out << "destroyed " << k.id << "\n"; });
            }
        }
        if (watch->parsed()) {
            const auto duration = parse_duration(watch_duration);
            const auto interval = parse_duration(watch_interval);
            if (!duration || !interval || interval->count() <= 0) {
                err << "error: --duration and --interval take durations such as 10s or 500ms\n";
                return 1;
            }
            return cmd_watch(client, g, watch_id, *duration, *interval, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::TransportError ? 2 : 1;
    }
    err << app.help();
    return 1;
}

}  // namespace reprobe
