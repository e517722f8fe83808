// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "reprobe/core/types.hpp"

namespace reprobe {

/// One canonical NDJSON line (LF-terminated). Keys are emitted in the order
/// indicator, target, timestamp, value, unit, labels, topic, sourceInstance and
/// labels are sorted by key, so equal observations always encode to equal bytes.
/// Precondition: observation_problems(obs) is empty.
std::string canonical_encode(const Observation& obs);

/// Encodes a batch as concatenated canonical lines.
std::string canonical_encode(std::span<const Observation> batch);

/// Accepts a line with or without its trailing LF. Throws Error(DecodeError).
Observation canonical_decode(std::string_view line);

/// Splits an NDJSON document into observations; blank lines are skipped.
std::vector<Observation> decode_ndjson(std::string_view text);

nlohmann::ordered_json observation_to_json(const Observation& obs);
Observation observation_from_json(const nlohmann::json& j);

nlohmann::json scalar_to_json(const Scalar& value);
/// Untyped conversion: JSON strings stay strings until validated against a schema.
std::optional<Scalar> scalar_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const InstanceConfig& cfg);
/// Throws Error(BadRequest) listing every malformed field.
InstanceConfig config_from_json(const nlohmann::json& j);
ConfigPatch patch_from_json(const nlohmann::json& j);

nlohmann::json descriptor_to_json(const PluginDescriptor& desc);
/// Parses a plugin manifest. Throws Error(SchemaInvalid) listing every problem.
PluginDescriptor descriptor_from_manifest(const nlohmann::json& manifest);

nlohmann::json command_to_json(const AdaptationCommand& command);
/// Throws Error(ProtocolError).
AdaptationCommand command_from_json(const nlohmann::json& j, std::string_view issued_by);

}  // namespace reprobe
