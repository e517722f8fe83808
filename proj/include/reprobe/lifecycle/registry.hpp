// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "reprobe/plugins/builtin.hpp"

namespace reprobe {

/// Everything needed to validate and instantiate a plugin.
struct PluginEntry {
    PluginDescriptor descriptor;
    ExtraConfigCheck extra_check;
    CollectorFactory make_collector;  // collectors
    SinkFactory make_sink;            // publishers
    std::string bundle;               // uploaded bytes, for idempotence checks
    std::filesystem::path install_dir;
};

/// The plugin collection shared by both managers. Ids form one namespace
/// across kinds.
class PluginRegistry {
  public:
    PluginRegistry(std::filesystem::path install_root, Duration handshake_timeout = Duration(5000));
    ~PluginRegistry();

    /// Throws Error(RegisterConflict) if the id is taken.
    void add(PluginEntry entry);
    void add_builtins(std::vector<BuiltinPlugin> builtins);

    struct UploadResult {
        PluginDescriptor descriptor;
        bool created = false;  // false: byte-identical re-upload
    };
    /// Throws MalformedBundle, SchemaInvalid or RegisterConflict.
    UploadResult upload(std::string_view bytes);

    /// Throws UnknownPlugin or BuiltinImmutable. Callers check for live instances.
    void remove(const std::string& id);

    std::shared_ptr<const PluginEntry> find(const std::string& id) const;
    /// Throws Error(UnknownPlugin).
    std::shared_ptr<const PluginEntry> get(const std::string& id) const;
    std::vector<PluginDescriptor> list() const;

  private:
    std::filesystem::path install_root_;
    Duration handshake_timeout_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const PluginEntry>> entries_;
    std::uint64_t installs_ = 0;
};

}  // namespace reprobe
