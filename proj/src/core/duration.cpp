// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/core/duration.hpp"

#include <charconv>
#include <cmath>

namespace reprobe {

std::optional<Duration> parse_duration(std::string_view text) {
    std::size_t split = 0;
    while (split < text.size() &&
           ((text[split] >= '0' && text[split] <= '9') || text[split] == '.')) {
        ++split;
    }
    if (split == 0) return std::nullopt;
    const std::string number(text.substr(0, split));
    const std::string_view unit = text.substr(split);

    double amount = 0.0;
    try {
        std::size_t used = 0;
        amount = std::stod(number, &used);
        if (used != number.size()) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }

    double millis = 0.0;
    if (unit.empty() || unit == "ms") {
        millis = amount;
    } else if (unit == "s") {
        millis = amount * 1e3;
    } else if (unit == "m") {
        millis = amount * 60e3;
    } else if (unit == "h") {
        millis = amount * 3600e3;
    } else {
        return std::nullopt;
    }
    if (!std::isfinite(millis) || millis > 1e15) return std::nullopt;
    const double rounded = std::round(millis);
    if (std::abs(rounded - millis) > 1e-6) return std::nullopt;  // sub-millisecond precision
    return Duration(static_cast<Duration::rep>(rounded));
}

std::string format_duration(Duration d) { return std::to_string(d.count()) + "ms"; }

}  // namespace reprobe
