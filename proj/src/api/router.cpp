// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/api/router.hpp"

#include <spdlog/spdlog.h>

#include "reprobe/api/json_views.hpp"
#include "reprobe/core/codec.hpp"

namespace reprobe {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) { return HttpResponse{status, body.dump(), "application/json"}; }

HttpResponse error_response(ErrorCode code, const std::string& message,
                            const std::vector<Violation>& details = {}) {
    return json_response(http_status_for(code), error_to_json(code, message, details));
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string current;
    const auto end = path.find('?');
    for (char c : path.substr(0, end)) {
        if (c == '/') {
            if (!current.empty()) parts.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) parts.push_back(std::move(current));
    return parts;
}

json parse_object(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadRequest, std::string("body is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::BadRequest, "body must be a JSON object");
    return j;
}

[[noreturn]] void method_not_allowed(const std::string& method, const std::string& path) {
    throw Error(ErrorCode::MethodNotAllowed, method + " is not supported on " + path);
}

}  // namespace

bool ApiRouter::authorized(const HttpRequest& request) const {
    if (!options_.auth_token) return true;
    auto it = request.headers.find("authorization");
    if (it == request.headers.end()) return false;
    return it->second == "Bearer " + *options_.auth_token;
}

HttpResponse ApiRouter::handle(const HttpRequest& request) {
    if (!authorized(request)) {
        return error_response(ErrorCode::Unauthorized, "missing or invalid bearer token");
    }
    try {
        return route(request);
    } catch (const Error& e) {
        return error_response(e.code(), e.what(), e.details());
    } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", request.method, request.path, e.what());
        return error_response(ErrorCode::Internal, e.what());
    }
}

HttpResponse ApiRouter::route(const HttpRequest& request) {
    const auto parts = split_path(request.path);
    if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1") {
        throw Error(ErrorCode::NotFound, "no route for " + request.path);
    }
    const std::string& collection = parts[2];
    if (collection == "status" && parts.size() == 3) {
        if (request.method != "GET") method_not_allowed(request.method, request.path);
        return json_response(200, status_to_json(agent_));
    }
    if (collection == "plugins" && parts.size() <= 4) {
        return plugins(request, parts.size() == 4 ? parts[3] : std::string());
    }
    if (collection == "collectors" || collection == "publishers") {
        const PluginKind kind = collection == "collectors" ? PluginKind::Collector : PluginKind::Publisher;
        if (parts.size() == 3) return instances(request, kind, {}, false);
        if (parts.size() == 4) return instances(request, kind, parts[3], false);
        if (parts.size() == 5 && parts[4] == "config") return instances(request, kind, parts[3], true);
    }
    throw Error(ErrorCode::NotFound, "no route for " + request.path);
}

HttpResponse ApiRouter::plugins(const HttpRequest& request, const std::string& id) {
    if (id.empty()) {
        if (request.method == "GET") {
            json list = json::array();
            for (const auto& d : agent_.registry().list()) list.push_back(descriptor_to_json(d));
            return json_response(200, list);
        }
        if (request.method == "POST") {
            auto result = agent_.upload_plugin(request.body);
            return json_response(result.created ? 201 : 200, descriptor_to_json(result.descriptor));
        }
        method_not_allowed(request.method, request.path);
    }
    if (request.method == "GET") {
        return json_response(200, descriptor_to_json(agent_.registry().get(id)->descriptor));
    }
    if (request.method == "DELETE") {
        agent_.remove_plugin(id);
        return HttpResponse{204, "", "application/json"};
    }
    method_not_allowed(request.method, request.path);
}

HttpResponse ApiRouter::instances(const HttpRequest& request, PluginKind kind, const std::string& id,
                                  bool config_suffix) {
    LifecycleManager& manager = agent_.manager(kind);
    // Stopped instances are kept as tombstones but are no longer addressable resources.
    auto visible = [&](const std::string& instance_id) {
        auto instance = manager.get(instance_id);
        if (instance->state() == InstanceState::Stopped) {
            throw Error(ErrorCode::UnknownInstance, "instance '" + instance_id + "' has been destroyed");
        }
        return instance;
    };

    if (id.empty()) {
        if (request.method == "GET") {
            json list = json::array();
            for (const auto& record : manager.list()) {
                if (record.state != InstanceState::Stopped) list.push_back(record_to_json(record));
            }
            return json_response(200, list);
        }
        if (request.method == "POST") {
            json body = parse_object(request.body);
            std::string instance_id;
            if (body.contains("id")) {
                if (!body["id"].is_string() || body["id"].get<std::string>().empty()) {
                    throw Error(ErrorCode::InvalidConfig, "'id' must be a nonempty string",
                                {{ErrorCode::TypeMismatch, "id", "expected a nonempty string"}});
                }
                instance_id = body["id"].get<std::string>();
                body.erase("id");
            }
            const InstanceConfig cfg = config_from_json(body);
            const InstanceRecord record = manager.instantiate(cfg, instance_id);
            return json_response(201, record_to_json(record));
        }
        method_not_allowed(request.method, request.path);
    }

    if (config_suffix) {
        if (request.method == "GET") return json_response(200, config_to_json(visible(id)->config()));
        if (request.method != "PATCH") method_not_allowed(request.method, request.path);
        const ConfigPatch patch = patch_from_json(parse_object(request.body));
        return json_response(200, config_to_json(manager.reconfigure(id, patch)));
    }
    if (request.method == "GET") return json_response(200, instance_details(*visible(id), agent_.bus()));
    if (request.method == "DELETE") {
        manager.destroy(id);
        return HttpResponse{204, "", "application/json"};
    }
    method_not_allowed(request.method, request.path);
}

}  // namespace reprobe
