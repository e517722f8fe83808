// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/plugins/sinks.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "reprobe/core/codec.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

FileSink::~FileSink() { close(); }

void FileSink::configure(const InstanceConfig& cfg) {
    auto path = cfg.param<std::string>("path");
    if (!path || path->empty()) {
        throw Error(ErrorCode::InvalidConfig, "file sink needs a 'path' param",
                    {{ErrorCode::MissingRequiredParam, "params.path", "required parameter is missing"}});
    }
    std::lock_guard lock(mutex_);
    if (fd_ >= 0 && path_ == *path) return;
    const int fd = ::open(path->c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw Error(ErrorCode::InvalidConfig,
                    "cannot open '" + *path + "' for appending: " + std::strerror(errno));
    }
    if (fd_ >= 0) {
        ::fsync(fd_);
        ::close(fd_);
    }
    fd_ = fd;
    path_ = *path;
}

void FileSink::publish(std::span<const Observation> batch) {
    const std::string data = canonical_encode(batch);
    std::lock_guard lock(mutex_);
    if (fd_ < 0) throw Error(ErrorCode::SinkUnavailable, "file sink is closed");
    std::size_t written = 0;
    while (written < data.size()) {
        const ssize_t n = ::write(fd_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::SinkUnavailable,
                        "write to '" + path_.string() + "' failed: " + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
}

void FileSink::close() {
    std::lock_guard lock(mutex_);
    if (fd_ < 0) return;
    ::fsync(fd_);
    ::close(fd_);
    fd_ = -1;
}

void CaptureStore::append(std::span<const Observation> batch) {
    std::lock_guard lock(mutex_);
    records_.insert(records_.end(), batch.begin(), batch.end());
}

std::vector<Observation> CaptureStore::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t CaptureStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

void CaptureStore::clear() {
    std::lock_guard lock(mutex_);
    records_.clear();
}

std::shared_ptr<CaptureStore> CaptureRegistry::open(const std::string& instance_id) {
    std::lock_guard lock(mutex_);
    auto& store = stores_[instance_id];
    if (!store) store = std::make_shared<CaptureStore>();
    return store;
}

std::shared_ptr<CaptureStore> CaptureRegistry::find(const std::string& instance_id) const {
    std::lock_guard lock(mutex_);
    auto it = stores_.find(instance_id);
    return it == stores_.end() ? nullptr : it->second;
}

}  // namespace reprobe
