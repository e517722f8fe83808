// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <map>
#include <optional>
#include <string>

#include "reprobe/agent/agent.hpp"

namespace reprobe {

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> headers;  // lower-case names
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct ApiOptions {
    /// Static bearer token; nullopt disables auth (local mode).
    std::optional<std::string> auth_token;
};

/// Transport-independent request handling for the /api/v1 endpoints.
class ApiRouter {
  public:
    ApiRouter(Agent& agent, ApiOptions options) : agent_(agent), options_(std::move(options)) {}

    /// Never throws: every failure becomes an ApiError body.
    HttpResponse handle(const HttpRequest& request);

    Agent& agent() { return agent_; }

  private:
    HttpResponse route(const HttpRequest& request);
    HttpResponse plugins(const HttpRequest& request, const std::string& id);
    HttpResponse instances(const HttpRequest& request, PluginKind kind, const std::string& id,
                           bool config_suffix);
    bool authorized(const HttpRequest& request) const;

    Agent& agent_;
    ApiOptions options_;
};

}  // namespace reprobe
