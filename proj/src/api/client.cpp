// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/api/client.hpp"

#include <httplib.h>

#include "reprobe/core/error.hpp"

namespace reprobe {

nlohmann::json ApiResult::json() const {
    if (body.empty()) return nullptr;
    auto parsed = nlohmann::json::parse(body, nullptr, false);
    return parsed.is_discarded() ? nlohmann::json(nullptr) : parsed;
}

struct ApiClient::Impl {
    httplib::Client client;
    std::optional<std::string> token;
    explicit Impl(const std::string& origin) : client(origin) {}
};

ApiClient::ApiClient(const std::string& endpoint, std::optional<std::string> token,
                     std::chrono::milliseconds timeout) {
    std::string origin = endpoint;
    if (!origin.starts_with("http://")) origin = "http://" + origin;
    while (origin.size() > 7 && origin.back() == '/') origin.pop_back();
    impl_ = std::make_unique<Impl>(origin);
    impl_->token = std::move(token);
    impl_->client.set_connection_timeout(timeout);
    impl_->client.set_read_timeout(timeout);
    impl_->client.set_write_timeout(timeout);
}

ApiClient::~ApiClient() = default;

ApiResult ApiClient::request(const std::string& method, const std::string& path, const std::string& body,
                             const std::string& content_type) {
    httplib::Headers headers;
    if (impl_->token) headers.emplace("Authorization", "Bearer " + *impl_->token);
    httplib::Result res{nullptr, httplib::Error::Unknown};
    auto& c = impl_->client;
    if (method == "GET") {
        res = c.Get(path, headers);
    } else if (method == "DELETE") {
        res = c.Delete(path, headers);
    } else if (method == "POST") {
        res = c.Post(path, headers, body, content_type);
    } else if (method == "PATCH") {
        res = c.Patch(path, headers, body, content_type);
    } else if (method == "PUT") {
        res = c.Put(path, headers, body, content_type);
    } else {
        throw Error(ErrorCode::TransportError, "unsupported method " + method);
    }
    if (!res) {
        throw Error(ErrorCode::TransportError,
                    method + " " + path + ": " + httplib::to_string(res.error()));
    }
    return ApiResult{res->status, res->body};
}

}  // namespace reprobe
