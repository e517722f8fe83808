// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "reprobe/core/types.hpp"

namespace reprobe {

struct BundleFile {
    std::string path;  // relative, normalized ("bin/plugin")
    std::string data;
    unsigned mode = 0644;
};

/// Reads a ustar/GNU/pax tar archive. Directories and links are skipped.
/// Throws Error(MalformedBundle) on truncation, bad checksums or unsafe paths.
std::vector<BundleFile> read_tar(std::string_view bytes);

/// Writes a ustar archive (used by tests and tooling to build bundles).
std::string write_tar(const std::vector<BundleFile>& files);

/// Normalizes an archive member path; empty result means it is unsafe.
std::string safe_member_path(std::string_view path);

struct Bundle {
    PluginDescriptor descriptor;  // provenance External
    std::vector<BundleFile> files;
};

/// Throws Error(MalformedBundle) for archive problems or a missing manifest or
/// entry, Error(SchemaInvalid) for manifest content problems.
Bundle parse_bundle(std::string_view bytes);

/// Writes the bundle under `dir` and returns the absolute entry path, made executable.
std::filesystem::path extract_bundle(const Bundle& bundle, const std::filesystem::path& dir);

}  // namespace reprobe
