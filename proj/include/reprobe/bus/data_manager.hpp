// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "reprobe/core/types.hpp"

namespace reprobe {

/// Exact topic names plus trailing-'*' prefixes. A bare "*" matches everything.
class TopicFilter {
  public:
    TopicFilter() = default;
    /// Throws Error(InvalidTopic) on a malformed pattern.
    explicit TopicFilter(std::vector<std::string> patterns);

    bool matches(std::string_view topic) const;
    const std::vector<std::string>& patterns() const { return patterns_; }

  private:
    std::vector<std::string> patterns_;
};

struct SubscriptionStats {
    std::vector<std::string> filter;
    std::size_t capacity = 0;
    std::size_t depth = 0;
    std::uint64_t enqueued = 0;
    std::uint64_t drained = 0;
    std::uint64_t dropped = 0;

    bool operator==(const SubscriptionStats&) const = default;
};

struct DeliveryReport {
    struct PerSubscriber {
        std::uint64_t delivered = 0;
        std::uint64_t dropped = 0;
    };
    std::size_t observations = 0;
    std::map<std::string, PerSubscriber> subscribers;  // only subscribers that matched

    std::uint64_t total_delivered() const;
};

/// In-process fan-out bus between collectors and publishers. Every subscription
/// is a bounded FIFO that evicts its oldest entry when full, so publish() never
/// waits on a slow consumer.
class DataManager {
  public:
    DataManager() = default;
    DataManager(const DataManager&) = delete;
    DataManager& operator=(const DataManager&) = delete;

    void subscribe(const std::string& subscriber_id, TopicFilter filter, std::size_t capacity);
    void unsubscribe(const std::string& subscriber_id);

    /// Replaces filter and capacity in place; shrinking evicts the oldest entries.
    void update(const std::string& subscriber_id, TopicFilter filter, std::size_t capacity);

    DeliveryReport publish(std::span<const Observation> batch);

    /// Removes and returns up to `max` queued observations in FIFO order.
    std::vector<Observation> drain(const std::string& subscriber_id, std::size_t max);

    bool has_subscriber(const std::string& subscriber_id) const;
    std::map<std::string, SubscriptionStats> stats() const;

  private:
    struct Queue;

    std::shared_ptr<Queue> find(const std::string& subscriber_id) const;

    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Queue>> queues_;
};

}  // namespace reprobe
