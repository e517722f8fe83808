// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reprobe {

enum class ErrorCode {
    // configuration validation
    UnknownParam,
    MissingRequiredParam,
    TypeMismatch,
    PeriodOutOfRange,
    EmptyIndicators,
    DuplicateIndicator,
    UnsupportedIndicator,
    UnknownSampler,
    UnknownAnalyzer,
    InvalidTopic,
    ConstraintViolated,
    InvalidConfig,
    // data manager
    DuplicateSubscriber,
    InvalidCapacity,
    UnknownSubscription,
    // plugin registry and lifecycle
    MalformedBundle,
    RegisterConflict,
    SchemaInvalid,
    UnknownPlugin,
    PluginInUse,
    BuiltinImmutable,
    SpawnFailed,
    UnknownInstance,
    InstanceExists,
    AlreadyTerminal,
    IllegalState,
    // collector runtime and behaviors
    InvalidCommand,
    SamplerFailure,
    SinkUnavailable,
    WindowTooShort,
    NonFiniteValue,
    EmptyStream,
    ProtocolError,
    // codecs and transport
    DecodeError,
    BadRequest,
    NotFound,
    MethodNotAllowed,
    Unauthorized,
    ConfigParseError,
    BindFailure,
    TransportError,
    Internal,
};

/// Stable snake_case identifier, used as the machine-readable API error code.
std::string_view to_string(ErrorCode code) noexcept;

/// A single field-level problem found while validating a document.
struct Violation {
    ErrorCode code;
    std::string field;
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::string format_violations(const std::vector<Violation>& violations);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message, std::vector<Violation> details = {})
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<Violation>& details() const noexcept { return details_; }

  private:
    ErrorCode code_;
    std::vector<Violation> details_;
};

}  // namespace reprobe
