// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <sys/types.h>

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprobe/core/types.hpp"

namespace reprobe {

/// A child process with piped stdin/stdout. stderr lines go to the agent log.
class Subprocess {
  public:
    /// Throws Error(SpawnFailed) if the executable cannot be started.
    Subprocess(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
               std::string log_name);
    ~Subprocess();
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    /// Throws Error(ProtocolError) if the pipe is closed.
    void write_line(const std::string& line);
    /// nullopt on timeout. Throws Error(ProtocolError) once stdout is closed.
    std::optional<std::string> read_line(Duration timeout);

    bool alive();
    /// Closes stdin, waits up to `grace`, then kills. Idempotent.
    void terminate(Duration grace);
    pid_t pid() const { return pid_; }

  private:
    void reap(bool block);

    pid_t pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    int stderr_fd_ = -1;
    std::string buffer_;
    std::string log_name_;
    std::thread stderr_thread_;
    std::mutex reap_mutex_;
    bool exited_ = false;
};

/// Request/response NDJSON channel on top of a Subprocess: one request in flight.
class PluginChannel {
  public:
    PluginChannel(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                  std::string log_name)
        : process_(argv, cwd, std::move(log_name)) {}

    /// Sends `message` and waits for the reply. Throws Error(ProtocolError) on
    /// timeout, EOF, malformed replies or {"ok":false}. After a timeout the
    /// channel is unusable because a late reply would desynchronize it.
    nlohmann::json request(const nlohmann::json& message, Duration timeout);
    /// Same, with the message already serialized on one line.
    nlohmann::json request_line(const std::string& line, std::string_view op, Duration timeout);
    /// Best effort: sends shutdown and stops the process.
    void close(Duration grace);
    bool usable();

  private:
    std::mutex mutex_;
    Subprocess process_;
    bool broken_ = false;
};

}  // namespace reprobe
