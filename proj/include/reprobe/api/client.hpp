// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace reprobe {

struct ApiResult {
    int status = 0;
    std::string body;

    bool ok() const { return status >= 200 && status < 300; }
    /// Parsed body; null when empty or not JSON.
    nlohmann::json json() const;
};

/// Thin blocking client for the management API.
class ApiClient {
  public:
    /// `endpoint` is "host:port" or "http://host:port".
    ApiClient(const std::string& endpoint, std::optional<std::string> token = std::nullopt,
              std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));
    ~ApiClient();

    /// Throws Error(TransportError) when no HTTP response arrives.
    ApiResult request(const std::string& method, const std::string& path, const std::string& body = {},
                      const std::string& content_type = "application/json");

    ApiResult get(const std::string& path) { return request("GET", path); }
    ApiResult del(const std::string& path) { return request("DELETE", path); }
    ApiResult post_json(const std::string& path, const nlohmann::json& body) {
        return request("POST", path, body.dump());
    }
    ApiResult patch_json(const std::string& path, const nlohmann::json& body) {
        return request("PATCH", path, body.dump());
    }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace reprobe
