// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "reprobe/api/router.hpp"

namespace reprobe {

/// "host:port" split; throws Error(ConfigParseError).
std::pair<std::string, int> parse_bind_address(const std::string& text);

/// HTTP/1.1 front end for an ApiRouter. The only listening socket in the agent.
class ApiServer {
  public:
    explicit ApiServer(ApiRouter& router);
    ~ApiServer();

    /// Binds and starts serving in the background. Port 0 picks a free port.
    /// Throws Error(BindFailure).
    void start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace reprobe
