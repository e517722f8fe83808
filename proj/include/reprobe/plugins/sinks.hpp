// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprobe/core/types.hpp"

namespace reprobe {

struct SinkStats {
    std::uint64_t batches = 0;
    std::uint64_t delivered = 0;
    std::uint64_t retries = 0;
    std::uint64_t failed_batches = 0;
    std::uint64_t lost = 0;  // drained from the bus but never acknowledged by the sink
    std::optional<std::string> last_error;
};

/// The ingestion-service side of a publisher.
class Sink {
  public:
    virtual ~Sink() = default;
    /// Throws Error(SpawnFailed) if the sink cannot come up.
    virtual void start(const InstanceConfig& cfg) { configure(cfg); }
    /// Applies new sink settings; throwing rejects them and keeps the old ones.
    virtual void configure(const InstanceConfig& cfg) = 0;
    /// Throws Error(SinkUnavailable) once delivery has definitively failed.
    virtual void publish(std::span<const Observation> batch) = 0;
    virtual void close() {}
    /// False once the sink can never deliver again (e.g. its process exited).
    virtual bool alive() const { return true; }
    /// Counters kept by the sink itself; lost/failed are tracked by the caller.
    virtual SinkStats stats() const { return {}; }
};

/// Appends canonical NDJSON lines to a file (param "path"); fsync on close.
class FileSink final : public Sink {
  public:
    ~FileSink() override;
    void configure(const InstanceConfig& cfg) override;
    void publish(std::span<const Observation> batch) override;
    void close() override;

  private:
    std::mutex mutex_;
    std::filesystem::path path_;
    int fd_ = -1;
};

struct HttpSinkSettings {
    std::string url;
    int retries = 2;
    Duration backoff{250};
    Duration timeout{2000};
};

/// POSTs each batch as an application/x-ndjson body. 5xx answers and
/// connection errors are retried `retries` times, `backoff` apart.
class HttpSink final : public Sink {
  public:
    void configure(const InstanceConfig& cfg) override;
    void publish(std::span<const Observation> batch) override;
    SinkStats stats() const override;

  private:
    mutable std::mutex mutex_;
    HttpSinkSettings settings_;
    std::uint64_t retries_ = 0;
};

/// Thread-safe in-memory record of everything a capture sink received.
class CaptureStore {
  public:
    void append(std::span<const Observation> batch);
    std::vector<Observation> records() const;
    std::size_t size() const;
    void clear();

  private:
    mutable std::mutex mutex_;
    std::vector<Observation> records_;
};

class CaptureRegistry {
  public:
    std::shared_ptr<CaptureStore> open(const std::string& instance_id);
    std::shared_ptr<CaptureStore> find(const std::string& instance_id) const;

  private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<CaptureStore>> stores_;
};

class CaptureSink final : public Sink {
  public:
    explicit CaptureSink(std::shared_ptr<CaptureStore> store) : store_(std::move(store)) {}
    void configure(const InstanceConfig&) override {}
    void publish(std::span<const Observation> batch) override { store_->append(batch); }

  private:
    std::shared_ptr<CaptureStore> store_;
};

}  // namespace reprobe
