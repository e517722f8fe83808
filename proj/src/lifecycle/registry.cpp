// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/lifecycle/registry.hpp"

#include <spdlog/spdlog.h>

#include "reprobe/core/error.hpp"
#include "reprobe/lifecycle/bundle.hpp"
#include "reprobe/lifecycle/external.hpp"

namespace reprobe {

PluginRegistry::PluginRegistry(std::filesystem::path install_root, Duration handshake_timeout)
    : install_root_(std::move(install_root)), handshake_timeout_(handshake_timeout) {}

PluginRegistry::~PluginRegistry() {
    std::error_code ec;
    for (const auto& [id, entry] : entries_) {
        if (!entry->install_dir.empty()) std::filesystem::remove_all(entry->install_dir, ec);
    }
}

void PluginRegistry::add(PluginEntry entry) {
    std::unique_lock lock(mutex_);
    const std::string id = entry.descriptor.id;
    if (entries_.contains(id)) {
        throw Error(ErrorCode::RegisterConflict, "plugin '" + id + "' is already registered");
    }
    entries_.emplace(id, std::make_shared<const PluginEntry>(std::move(entry)));
}

void PluginRegistry::add_builtins(std::vector<BuiltinPlugin> builtins) {
    for (auto& b : builtins) {
        add(PluginEntry{std::move(b.descriptor), std::move(b.extra_check), std::move(b.make_collector),
                        std::move(b.make_sink), {}, {}});
    }
}

PluginRegistry::UploadResult PluginRegistry::upload(std::string_view bytes) {
    Bundle bundle = parse_bundle(bytes);
    const std::string id = bundle.descriptor.id;

    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(id); it != entries_.end()) {
        const auto& existing = *it->second;
        if (existing.descriptor.provenance == Provenance::External && existing.bundle == bytes) {
            return UploadResult{existing.descriptor, false};
        }
        throw Error(ErrorCode::RegisterConflict,
                    existing.descriptor.provenance == Provenance::Builtin
                        ? "plugin id '" + id + "' belongs to a builtin plugin"
                        : "plugin '" + id + "' is already registered with different content");
    }

    const auto dir = install_root_ / (id + "-" + std::to_string(++installs_));
    std::filesystem::path executable;
    try {
        std::filesystem::remove_all(dir);
        executable = extract_bundle(bundle, dir);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::MalformedBundle, std::string("cannot install bundle: ") + e.what());
    }

    PluginEntry entry;
    entry.descriptor = bundle.descriptor;
    entry.bundle = std::string(bytes);
    entry.install_dir = dir;
    const ExternalPluginOptions options{executable, dir, handshake_timeout_};
    const PluginDescriptor desc = bundle.descriptor;
    if (desc.kind == PluginKind::Collector) {
        entry.make_collector = [desc, options](const std::string& instance_id, const InstanceConfig&) {
            return std::unique_ptr<CollectorBackend>(
                std::make_unique<ExternalCollectorBackend>(desc, options, instance_id));
        };
    } else {
        entry.make_sink = [desc, options](const std::string& instance_id, const InstanceConfig&) {
            return std::unique_ptr<Sink>(std::make_unique<ExternalSink>(desc, options, instance_id));
        };
    }
    entries_.emplace(id, std::make_shared<const PluginEntry>(std::move(entry)));
    spdlog::info("registered external {} plugin '{}' version {}", to_string(desc.kind), id, desc.version);
    return UploadResult{desc, true};
}

void PluginRegistry::remove(const std::string& id) {
    std::shared_ptr<const PluginEntry> removed;
    {
        std::unique_lock lock(mutex_);
        auto it = entries_.find(id);
        if (it == entries_.end()) throw Error(ErrorCode::UnknownPlugin, "no plugin '" + id + "'");
        if (it->second->descriptor.provenance == Provenance::Builtin) {
            throw Error(ErrorCode::BuiltinImmutable, "builtin plugin '" + id + "' cannot be removed");
        }
        removed = it->second;
        entries_.erase(it);
    }
    if (!removed->install_dir.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(removed->install_dir, ec);
    }
}

std::shared_ptr<const PluginEntry> PluginRegistry::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : it->second;
}

std::shared_ptr<const PluginEntry> PluginRegistry::get(const std::string& id) const {
    auto entry = find(id);
    if (!entry) throw Error(ErrorCode::UnknownPlugin, "no plugin '" + id + "'");
    return entry;
}

std::vector<PluginDescriptor> PluginRegistry::list() const {
    std::shared_lock lock(mutex_);
    std::vector<PluginDescriptor> out;
    for (const auto& [id, entry] : entries_) out.push_back(entry->descriptor);
    return out;
}

}  // namespace reprobe
