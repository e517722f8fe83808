// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "reprobe/cli/cli.hpp"
#include "reprobe/core/codec.hpp"
#include "reprobe/core/duration.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

using nlohmann::json;

ServeConfig parse_serve_config(const json& doc) {
    ServeConfig cfg;
    std::vector<Violation> v;
    if (!doc.is_object()) {
        throw Error(ErrorCode::ConfigParseError, "config must be a JSON object",
                    {{ErrorCode::ConfigParseError, "", "expected a JSON object"}});
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "bind" && key != "authToken" && key != "periodBounds" && key != "bootstrap") {
            v.push_back({ErrorCode::UnknownParam, key, "unknown field"});
        }
    }
    if (auto it = doc.find("bind"); it != doc.end()) {
        if (!it->is_string()) {
            v.push_back({ErrorCode::TypeMismatch, "bind", "expected \"host:port\""});
        } else {
            cfg.bind = it->get<std::string>();
            try {
                parse_bind_address(cfg.bind);
            } catch (const Error& e) {
                v.push_back({ErrorCode::ConfigParseError, "bind", e.what()});
            }
        }
    }
    if (auto it = doc.find("authToken"); it != doc.end() && !it->is_null()) {
        if (it->is_string() && !it->get<std::string>().empty()) {
            cfg.auth_token = it->get<std::string>();
        } else {
            v.push_back({ErrorCode::TypeMismatch, "authToken", "expected a nonempty string"});
        }
    }
    if (auto it = doc.find("periodBounds"); it != doc.end()) {
        if (!it->is_object()) {
            v.push_back({ErrorCode::TypeMismatch, "periodBounds", "expected {\"min\": ..., \"max\": ...}"});
        } else {
            for (const char* key : {"min", "max"}) {
                auto b = it->find(key);
                if (b == it->end()) continue;
                std::optional<Duration> d;
                if (b->is_string()) d = parse_duration(b->get<std::string>());
                if (b->is_number_unsigned()) d = Duration(b->get<std::int64_t>());
                if (!d || d->count() < 1) {
                    v.push_back({ErrorCode::TypeMismatch, std::string("periodBounds.") + key,
                                 "expected a positive duration"});
                    continue;
                }
                (std::string_view(key) == "min" ? cfg.bounds.min : cfg.bounds.max) = *d;
            }
            if (cfg.bounds.min >= cfg.bounds.max) {
                v.push_back({ErrorCode::ConstraintViolated, "periodBounds", "min must be below max"});
            }
        }
    }
    if (auto it = doc.find("bootstrap"); it != doc.end()) {
        if (!it->is_array()) {
            v.push_back({ErrorCode::TypeMismatch, "bootstrap", "expected an array"});
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const json& item = (*it)[i];
                const std::string where = "bootstrap[" + std::to_string(i) + "]";
                if (!item.is_object()) {
                    v.push_back({ErrorCode::TypeMismatch, where, "expected an object"});
                    continue;
                }
                BootstrapInstance b;
                auto kind = item.find("kind");
                std::optional<PluginKind> parsed;
                if (kind != item.end() && kind->is_string()) parsed = parse_plugin_kind(kind->get<std::string>());
                if (!parsed) {
                    v.push_back({ErrorCode::TypeMismatch, where + ".kind", "expected \"collector\" or \"publisher\""});
                } else {
                    b.kind = *parsed;
                }
                if (auto id = item.find("id"); id != item.end()) {
                    if (id->is_string()) {
                        b.id = id->get<std::string>();
                    } else {
                        v.push_back({ErrorCode::TypeMismatch, where + ".id", "expected a string"});
                    }
                }
                for (const auto& [key, value] : item.items()) {
                    if (key != "kind" && key != "id" && key != "config") {
                        v.push_back({ErrorCode::UnknownParam, where + "." + key, "unknown field"});
                    }
                }
                auto config = item.find("config");
                if (config == item.end()) {
                    v.push_back({ErrorCode::MissingRequiredParam, where + ".config", "required"});
                    continue;
                }
                try {
                    b.config = config_from_json(*config);
                } catch (const Error& e) {
                    for (const auto& d : e.details()) {
                        v.push_back({d.code, where + ".config." + d.field, d.message});
                    }
                    if (e.details().empty()) v.push_back({e.code(), where + ".config", e.what()});
                }
                cfg.bootstrap.push_back(std::move(b));
            }
        }
    }
    if (!v.empty()) {
        throw Error(ErrorCode::ConfigParseError, "invalid agent config: " + format_violations(v), v);
    }
    return cfg;
}

ServeConfig load_serve_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigParseError, "cannot read " + path.string(),
                    {{ErrorCode::ConfigParseError, "", "cannot read " + path.string()}});
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buffer.str());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigParseError, std::string("config is not JSON: ") + e.what(),
                    {{ErrorCode::ConfigParseError, "", e.what()}});
    }
    return parse_serve_config(doc);
}

ServeSession::ServeSession(const ServeConfig& config, AgentOptions options) {
    options.bounds = config.bounds;
    agent_ = std::make_unique<Agent>(options);

    // Validate every bootstrap entry before starting anything, so all problems are reported at once.
    std::vector<Violation> v;
    for (std::size_t i = 0; i < config.bootstrap.size(); ++i) {
        const auto& b = config.bootstrap[i];
        const std::string where = "bootstrap[" + std::to_string(i) + "]";
        auto entry = agent_->registry().find(b.config.plugin_id);
        if (!entry) {
            v.push_back({ErrorCode::UnknownPlugin, where + ".config.pluginId",
                         "no plugin '" + b.config.plugin_id + "'"});
            continue;
        }
        auto result = validate_instance_config(b.config, entry->descriptor, b.kind, config.bounds,
                                               entry->extra_check);
        for (const auto& d : result.violations) v.push_back({d.code, where + ".config." + d.field, d.message});
    }
    if (!v.empty()) {
        throw Error(ErrorCode::ConfigParseError, "invalid bootstrap: " + format_violations(v), v);
    }

    auto [host, port] = parse_bind_address(config.bind);
    host_ = host;
    router_ = std::make_unique<ApiRouter>(*agent_, ApiOptions{config.auth_token});
    server_ = std::make_unique<ApiServer>(*router_);
    server_->start(host, port);

    // Publishers first so the first collector ticks already have somewhere to go.
    for (PluginKind kind : {PluginKind::Publisher, PluginKind::Collector}) {
        for (const auto& b : config.bootstrap) {
            if (b.kind == kind) agent_->manager(kind).instantiate(b.config, b.id);
        }
    }
}

ServeSession::~ServeSession() {
    if (server_) server_->stop();
    if (agent_) agent_->shutdown();
}

std::string ServeSession::endpoint() const { return host_ + ":" + std::to_string(port()); }

}  // namespace reprobe
