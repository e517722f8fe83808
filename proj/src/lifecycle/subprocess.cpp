// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/lifecycle/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include <spdlog/spdlog.h>

#include "reprobe/core/error.hpp"

extern char** environ;

namespace reprobe {

namespace {

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                       std::string log_name)
    : log_name_(std::move(log_name)) {
    ignore_sigpipe();
    if (argv.empty()) throw Error(ErrorCode::SpawnFailed, "empty command line");

    int in[2], out[2], err[2];
    if (::pipe2(in, O_CLOEXEC) != 0) throw Error(ErrorCode::SpawnFailed, "pipe failed");
    if (::pipe2(out, O_CLOEXEC) != 0) {
        ::close(in[0]), ::close(in[1]);
        throw Error(ErrorCode::SpawnFailed, "pipe failed");
    }
    if (::pipe2(err, O_CLOEXEC) != 0) {
        ::close(in[0]), ::close(in[1]), ::close(out[0]), ::close(out[1]);
        throw Error(ErrorCode::SpawnFailed, "pipe failed");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in[0], 0);
    posix_spawn_file_actions_adddup2(&actions, out[1], 1);
    posix_spawn_file_actions_adddup2(&actions, err[1], 2);
    if (!cwd.empty()) posix_spawn_file_actions_addchdir_np(&actions, cwd.c_str());

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    // Children start with an empty signal mask whatever the caller blocked.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    sigset_t empty;
    sigemptyset(&empty);
    posix_spawnattr_setsigmask(&attr, &empty);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETSIGMASK);

    const int rc = ::posix_spawn(&pid_, args[0], &actions, &attr, args.data(), environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    if (rc != 0) {
        ::close(in[1]), ::close(out[0]), ::close(err[0]);
        pid_ = -1;
        throw Error(ErrorCode::SpawnFailed,
                    "cannot start '" + argv[0] + "': " + std::strerror(rc));
    }
    stdin_fd_ = in[1];
    stdout_fd_ = out[0];
    stderr_fd_ = err[0];

    stderr_thread_ = std::thread([fd = stderr_fd_, name = log_name_] {
        std::string pending;
        char buf[4096];
        for (;;) {
            const ssize_t n = ::read(fd, buf, sizeof buf);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) break;
            pending.append(buf, static_cast<std::size_t>(n));
            for (auto nl = pending.find('\n'); nl != std::string::npos; nl = pending.find('\n')) {
                spdlog::info("[{}] {}", name, pending.substr(0, nl));
                pending.erase(0, nl + 1);
            }
        }
        if (!pending.empty()) spdlog::info("[{}] {}", name, pending);
    });
}

Subprocess::~Subprocess() {
    terminate(Duration(500));
    if (stderr_thread_.joinable()) stderr_thread_.join();
    close_fd(stdout_fd_);
    close_fd(stderr_fd_);
}

void Subprocess::write_line(const std::string& line) {
    std::string data = line;
    data += '\n';
    std::size_t written = 0;
    while (written < data.size()) {
        if (stdin_fd_ < 0) throw Error(ErrorCode::ProtocolError, "plugin stdin is closed");
        const ssize_t n = ::write(stdin_fd_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::ProtocolError,
                        std::string("write to plugin failed: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> Subprocess::read_line(Duration timeout) {
    using Steady = std::chrono::steady_clock;
    const auto deadline = Steady::now() + timeout;
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        if (stdout_fd_ < 0) throw Error(ErrorCode::ProtocolError, "plugin closed its stdout");
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Steady::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd pfd{stdout_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::ProtocolError, std::string("poll failed: ") + std::strerror(errno));
        }
        if (rc == 0) return std::nullopt;
        char buf[8192];
        const ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw Error(ErrorCode::ProtocolError, std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            close_fd(stdout_fd_);
            throw Error(ErrorCode::ProtocolError, "plugin closed its stdout");
        }
        buffer_.append(buf, static_cast<std::size_t>(n));
    }
}

void Subprocess::reap(bool block) {
    std::lock_guard lock(reap_mutex_);
    if (exited_ || pid_ < 0) return;
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, block ? 0 : WNOHANG);
    if (r == pid_ || (r < 0 && errno == ECHILD)) exited_ = true;
}

bool Subprocess::alive() {
    reap(false);
    std::lock_guard lock(reap_mutex_);
    return pid_ >= 0 && !exited_;
}

void Subprocess::terminate(Duration grace) {
    close_fd(stdin_fd_);
    if (pid_ < 0) return;
    const auto deadline = std::chrono::steady_clock::now() + grace;
    while (alive() && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (alive()) {
        ::kill(pid_, SIGKILL);
        reap(true);
    }
}

nlohmann::json PluginChannel::request(const nlohmann::json& message, Duration timeout) {
    return request_line(message.dump(), message.value("op", std::string("?")), timeout);
}

nlohmann::json PluginChannel::request_line(const std::string& message, std::string_view op,
                                           Duration timeout) {
    std::lock_guard lock(mutex_);
    if (broken_) throw Error(ErrorCode::ProtocolError, "plugin channel is unusable");
    std::optional<std::string> line;
    try {
        process_.write_line(message);
        line = process_.read_line(timeout);
    } catch (const Error&) {
        broken_ = true;
        throw;
    }
    if (!line) {
        broken_ = true;
        throw Error(ErrorCode::ProtocolError,
                    "no reply to '" + std::string(op) + "' within " +
                        std::to_string(timeout.count()) + "ms");
    }
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(*line);
    } catch (const nlohmann::json::exception&) {
        broken_ = true;
        throw Error(ErrorCode::ProtocolError, "plugin reply is not JSON: " + line->substr(0, 200));
    }
    if (!reply.is_object() || !reply.contains("ok") || !reply["ok"].is_boolean()) {
        throw Error(ErrorCode::ProtocolError, "plugin reply lacks a boolean 'ok'");
    }
    if (!reply["ok"].get<bool>()) {
        std::string error = "plugin reported an error";
        if (reply.contains("error") && reply["error"].is_string()) error = reply["error"];
        throw Error(ErrorCode::ProtocolError, error);
    }
    return reply;
}

void PluginChannel::close(Duration grace) {
    std::lock_guard lock(mutex_);
    if (!broken_) {
        try {
            process_.write_line(R"({"op":"shutdown"})");
        } catch (const Error&) {
        }
    }
    broken_ = true;
    process_.terminate(grace);
}

bool PluginChannel::usable() {
    std::lock_guard lock(mutex_);
    return !broken_ && process_.alive();
}

}  // namespace reprobe
