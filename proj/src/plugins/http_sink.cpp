// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "reprobe/core/codec.hpp"
#include "reprobe/core/error.hpp"
#include "reprobe/plugins/sinks.hpp"

namespace reprobe {

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") return std::nullopt;
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (out.origin.size() <= scheme_end + 3) return std::nullopt;
    return out;
}

}  // namespace

void HttpSink::configure(const InstanceConfig& cfg) {
    HttpSinkSettings next;
    next.url = cfg.param<std::string>("url").value_or("");
    if (!parse_url(next.url)) {
        throw Error(ErrorCode::InvalidConfig, "http sink needs an http:// 'url' param",
                    {{ErrorCode::TypeMismatch, "params.url", "expected http://host[:port]/path"}});
    }
    if (auto v = cfg.param<std::int64_t>("retries")) next.retries = static_cast<int>(*v);
    if (auto v = cfg.param<Duration>("backoff")) next.backoff = *v;
    if (auto v = cfg.param<Duration>("timeout")) next.timeout = *v;
    std::lock_guard lock(mutex_);
    settings_ = std::move(next);
}

void HttpSink::publish(std::span<const Observation> batch) {
    HttpSinkSettings settings;
    {
        std::lock_guard lock(mutex_);
        settings = settings_;
    }
    const auto url = *parse_url(settings.url);
    const std::string body = canonical_encode(batch);

    httplib::Client client(url.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(settings.timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    std::string last_error;
    for (int attempt = 0; attempt <= settings.retries; ++attempt) {
        if (attempt > 0) {
            {
                std::lock_guard lock(mutex_);
                ++retries_;
            }
            std::this_thread::sleep_for(settings.backoff);
        }
        auto res = client.Post(url.path, body, "application/x-ndjson");
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return;
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status < 500) break;  // client errors are not retried
    }
    throw Error(ErrorCode::SinkUnavailable, "POST " + settings.url + " failed: " + last_error);
}

SinkStats HttpSink::stats() const {
    std::lock_guard lock(mutex_);
    SinkStats s;
    s.retries = retries_;
    return s;
}

}  // namespace reprobe
