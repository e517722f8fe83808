// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/core/error.hpp"

namespace reprobe {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownParam: return "unknown_param";
        case ErrorCode::MissingRequiredParam: return "missing_required_param";
        case ErrorCode::TypeMismatch: return "type_mismatch";
        case ErrorCode::PeriodOutOfRange: return "period_out_of_range";
        case ErrorCode::EmptyIndicators: return "empty_indicators";
        case ErrorCode::DuplicateIndicator: return "duplicate_indicator";
        case ErrorCode::UnsupportedIndicator: return "unsupported_indicator";
        case ErrorCode::UnknownSampler: return "unknown_sampler";
        case ErrorCode::UnknownAnalyzer: return "unknown_analyzer";
        case ErrorCode::InvalidTopic: return "invalid_topic";
        case ErrorCode::ConstraintViolated: return "constraint_violated";
        case ErrorCode::InvalidConfig: return "invalid_config";
        case ErrorCode::DuplicateSubscriber: return "duplicate_subscriber";
        case ErrorCode::InvalidCapacity: return "invalid_capacity";
        case ErrorCode::UnknownSubscription: return "unknown_subscription";
        case ErrorCode::MalformedBundle: return "malformed_bundle";
        case ErrorCode::RegisterConflict: return "register_conflict";
        case ErrorCode::SchemaInvalid: return "schema_invalid";
        case ErrorCode::UnknownPlugin: return "unknown_plugin";
        case ErrorCode::PluginInUse: return "plugin_in_use";
        case ErrorCode::BuiltinImmutable: return "builtin_immutable";
        case ErrorCode::SpawnFailed: return "spawn_failed";
        case ErrorCode::UnknownInstance: return "unknown_instance";
        case ErrorCode::InstanceExists: return "instance_exists";
        case ErrorCode::AlreadyTerminal: return "already_terminal";
        case ErrorCode::IllegalState: return "illegal_state";
        case ErrorCode::InvalidCommand: return "invalid_command";
        case ErrorCode::SamplerFailure: return "sampler_failure";
        case ErrorCode::SinkUnavailable: return "sink_unavailable";
        case ErrorCode::WindowTooShort: return "window_too_short";
        case ErrorCode::NonFiniteValue: return "non_finite_value";
        case ErrorCode::EmptyStream: return "empty_stream";
        case ErrorCode::ProtocolError: return "protocol_error";
        case ErrorCode::DecodeError: return "decode_error";
        case ErrorCode::BadRequest: return "bad_request";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::MethodNotAllowed: return "method_not_allowed";
        case ErrorCode::Unauthorized: return "unauthorized";
        case ErrorCode::ConfigParseError: return "config_parse_error";
        case ErrorCode::BindFailure: return "bind_failure";
        case ErrorCode::TransportError: return "transport_error";
        case ErrorCode::Internal: return "internal";
    }
    return "internal";
}

std::string format_violations(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += std::string(to_string(v.code));
        if (!v.field.empty()) out += " (" + v.field + ")";
        if (!v.message.empty()) out += ": " + v.message;
    }
    return out;
}

}  // namespace reprobe
