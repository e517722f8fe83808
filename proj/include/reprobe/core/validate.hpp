// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "reprobe/core/error.hpp"
#include "reprobe/core/types.hpp"

namespace reprobe {

/// Plugin-specific cross-field rules, run after the schema checks.
using ExtraConfigCheck = std::function<void(const InstanceConfig&, std::vector<Violation>&)>;

struct ValidationResult {
    std::optional<InstanceConfig> config;
    std::vector<Violation> violations;

    bool ok() const { return config.has_value(); }
};

/// Checks `cfg` against `desc` and fills schema defaults. Every violation is
/// reported, not only the first. Params come back coerced to their schema types,
/// so validating a validated config returns it unchanged.
ValidationResult validate_instance_config(const InstanceConfig& cfg, const PluginDescriptor& desc,
                                          PluginKind expected_kind,
                                          const PeriodBounds& bounds = {},
                                          const ExtraConfigCheck& extra = {});

/// Same, but throws Error(InvalidConfig) carrying the violation list.
InstanceConfig validate_or_throw(const InstanceConfig& cfg, const PluginDescriptor& desc,
                                 PluginKind expected_kind, const PeriodBounds& bounds = {},
                                 const ExtraConfigCheck& extra = {});

/// Converts `value` to the representation declared by `type`, if compatible.
std::optional<Scalar> coerce_scalar(const Scalar& value, ParamType type);

/// Checks one publisher topic-filter entry: nonempty, '*' only as the last char.
bool valid_filter_pattern(std::string_view pattern);

}  // namespace reprobe
