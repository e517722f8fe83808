// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "reprobe/core/types.hpp"

namespace reprobe {

/// Parses "250ms", "2s", "1.5s", "5m", "1h" or a bare integer (milliseconds).
std::optional<Duration> parse_duration(std::string_view text);

/// Always renders milliseconds, e.g. "500ms".
std::string format_duration(Duration d);

}  // namespace reprobe
