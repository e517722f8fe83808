// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprobe/agent/agent.hpp"
#include "reprobe/api/client.hpp"
#include "reprobe/api/router.hpp"
#include "reprobe/api/server.hpp"

namespace reprobe {

struct BootstrapInstance {
    PluginKind kind = PluginKind::Collector;
    std::string id;  // empty: generated
    InstanceConfig config;
};

/// The `serve` configuration file:
/// {"bind": "127.0.0.1:7700", "authToken": "...", "periodBounds": {"min": "10ms", "max": "1h"},
///  "bootstrap": [{"kind": "collector", "id": "c1", "config": {...}}]}
struct ServeConfig {
    std::string bind = "127.0.0.1:7700";
    std::optional<std::string> auth_token;
    PeriodBounds bounds;
    std::vector<BootstrapInstance> bootstrap;
};

/// Throws Error(ConfigParseError) listing every problem.
ServeConfig parse_serve_config(const nlohmann::json& doc);
ServeConfig load_serve_config(const std::filesystem::path& path);

/// A running agent with its API server, as started by `serve`.
class ServeSession {
  public:
    /// Bootstraps the declared instances and binds the API. Every bootstrap
    /// problem is collected before anything starts; throws Error(ConfigParseError)
    /// with the full list, or Error(BindFailure).
    explicit ServeSession(const ServeConfig& config, AgentOptions options = {});
    ~ServeSession();

    Agent& agent() { return *agent_; }
    int port() const { return server_->port(); }
    std::string endpoint() const;

  private:
    std::unique_ptr<Agent> agent_;
    std::unique_ptr<ApiRouter> router_;
    std::unique_ptr<ApiServer> server_;
    std::string host_;
};

/// Parses "k=v" assignments into a PATCH body. "samplingPeriod", "activeSampler",
/// "activeAnalyzer", "indicators" and "topics" (comma-separated) are config
/// fields; anything else, optionally prefixed "params.", is a parameter whose
/// value is read as JSON when possible and as a string otherwise.
nlohmann::json assignments_to_patch(const std::vector<std::string>& assignments);

/// Runs the command line; returns the exit code (0 ok, 1 API/usage error, 2 transport failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reprobe
