// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/api/server.hpp"

#include <algorithm>
#include <cctype>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

std::pair<std::string, int> parse_bind_address(const std::string& text) {
    std::string rest = text;
    if (rest.starts_with("http://")) rest = rest.substr(7);
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
        throw Error(ErrorCode::ConfigParseError, "bind address '" + text + "' is not host:port");
    }
    const std::string port_text = rest.substr(colon + 1);
    if (!std::all_of(port_text.begin(), port_text.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        port_text.size() > 5) {
        throw Error(ErrorCode::ConfigParseError, "bind address '" + text + "' has a bad port");
    }
    const int port = std::stoi(port_text);
    if (port > 65535) throw Error(ErrorCode::ConfigParseError, "port out of range in '" + text + "'");
    return {rest.substr(0, colon), port};
}

struct ApiServer::Impl {
    ApiRouter& router;
    httplib::Server server;
    explicit Impl(ApiRouter& r) : router(r) {}
};

ApiServer::ApiServer(ApiRouter& router) : impl_(std::make_unique<Impl>(router)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        HttpRequest request;
        request.method = req.method;
        request.path = req.path;
        request.body = req.body;
        for (const auto& [name, value] : req.headers) {
            std::string key = name;
            std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
            request.headers[key] = value;
        }
        const HttpResponse response = impl_->router.handle(request);
        res.status = response.status;
        if (response.status != 204) res.set_content(response.body, response.content_type);
    };
    const std::string any = R"(/.*)";
    impl_->server.Get(any, handler);
    impl_->server.Post(any, handler);
    impl_->server.Put(any, handler);
    impl_->server.Patch(any, handler);
    impl_->server.Delete(any, handler);
    impl_->server.set_payload_max_length(64ull << 20);
    // No SO_REUSEPORT: a second agent on the same port must fail to bind.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ <= 0) throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":0");
    } else {
        if (!impl_->server.bind_to_port(host, port)) {
            throw Error(ErrorCode::BindFailure,
                        "cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
        }
        port_ = port;
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    spdlog::info("management API listening on {}:{}", host, port_);
}

void ApiServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

}  // namespace reprobe
