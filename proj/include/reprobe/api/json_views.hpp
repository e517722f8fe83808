// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <nlohmann/json.hpp>

#include "reprobe/agent/agent.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

/// "2026-01-02T03:04:05.678Z"
std::string format_timestamp(TimePoint t);

int http_status_for(ErrorCode code) noexcept;
nlohmann::json error_to_json(ErrorCode code, const std::string& message,
                             const std::vector<Violation>& details = {});

nlohmann::json record_to_json(const InstanceRecord& record);
nlohmann::json audit_to_json(const AuditEntry& entry);
/// Record plus kind-specific detail: audit log and counters for collectors,
/// sink and subscription statistics for publishers.
nlohmann::json instance_details(const Instance& instance, DataManager& bus);
nlohmann::json status_to_json(Agent& agent);

}  // namespace reprobe
