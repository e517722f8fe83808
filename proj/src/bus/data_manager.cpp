// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/bus/data_manager.hpp"

#include <deque>

#include "reprobe/core/error.hpp"
#include "reprobe/core/validate.hpp"

namespace reprobe {

TopicFilter::TopicFilter(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
    for (const auto& p : patterns_) {
        if (!valid_filter_pattern(p)) {
            throw Error(ErrorCode::InvalidTopic, "malformed topic filter entry '" + p + "'");
        }
    }
}

bool TopicFilter::matches(std::string_view topic) const {
    for (const auto& p : patterns_) {
        if (p.back() == '*') {
            if (topic.substr(0, p.size() - 1) == std::string_view(p).substr(0, p.size() - 1)) {
                return true;
            }
        } else if (topic == p) {
            return true;
        }
    }
    return false;
}

std::uint64_t DeliveryReport::total_delivered() const {
    std::uint64_t total = 0;
    for (const auto& [id, s] : subscribers) total += s.delivered;
    return total;
}

struct DataManager::Queue {
    mutable std::mutex mutex;
    TopicFilter filter;
    std::size_t capacity = 0;
    std::deque<Observation> items;
    std::uint64_t enqueued = 0;
    std::uint64_t drained = 0;
    std::uint64_t dropped = 0;

    // Caller holds `mutex`.
    void trim() {
        while (items.size() > capacity) {
            items.pop_front();
            ++dropped;
        }
    }

    SubscriptionStats snapshot() const {
        return SubscriptionStats{filter.patterns(), capacity, items.size(), enqueued, drained, dropped};
    }
};

void DataManager::subscribe(const std::string& subscriber_id, TopicFilter filter,
                            std::size_t capacity) {
    if (capacity < 1) {
        throw Error(ErrorCode::InvalidCapacity, "subscription capacity must be at least 1");
    }
    auto queue = std::make_shared<Queue>();
    queue->filter = std::move(filter);
    queue->capacity = capacity;

    std::unique_lock lock(map_mutex_);
    if (queues_.contains(subscriber_id)) {
        throw Error(ErrorCode::DuplicateSubscriber,
                    "subscriber '" + subscriber_id + "' is already subscribed");
    }
    queues_.emplace(subscriber_id, std::move(queue));
}

void DataManager::unsubscribe(const std::string& subscriber_id) {
    std::unique_lock lock(map_mutex_);
    if (queues_.erase(subscriber_id) == 0) {
        throw Error(ErrorCode::UnknownSubscription, "no subscription '" + subscriber_id + "'");
    }
}

void DataManager::update(const std::string& subscriber_id, TopicFilter filter,
                         std::size_t capacity) {
    if (capacity < 1) {
        throw Error(ErrorCode::InvalidCapacity, "subscription capacity must be at least 1");
    }
    // Exclusive map lock: no publish is mid-way through matching this queue.
    std::unique_lock lock(map_mutex_);
    auto it = queues_.find(subscriber_id);
    if (it == queues_.end()) {
        throw Error(ErrorCode::UnknownSubscription, "no subscription '" + subscriber_id + "'");
    }
    std::lock_guard qlock(it->second->mutex);
    it->second->filter = std::move(filter);
    it->second->capacity = capacity;
    it->second->trim();
}

DeliveryReport DataManager::publish(std::span<const Observation> batch) {
    DeliveryReport report;
    report.observations = batch.size();
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, queue] : queues_) {
        std::lock_guard qlock(queue->mutex);
        DeliveryReport::PerSubscriber* entry = nullptr;
        for (const auto& obs : batch) {
            if (!queue->filter.matches(obs.topic)) continue;
            if (entry == nullptr) entry = &report.subscribers[id];
            queue->items.push_back(obs);
            ++queue->enqueued;
            ++entry->delivered;
            if (queue->items.size() > queue->capacity) {
                queue->items.pop_front();
                ++queue->dropped;
                ++entry->dropped;
            }
        }
    }
    return report;
}

std::vector<Observation> DataManager::drain(const std::string& subscriber_id, std::size_t max) {
    auto queue = find(subscriber_id);
    std::vector<Observation> out;
    std::lock_guard qlock(queue->mutex);
    const std::size_t n = std::min(max, queue->items.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::move(queue->items.front()));
        queue->items.pop_front();
    }
    queue->drained += n;
    return out;
}

bool DataManager::has_subscriber(const std::string& subscriber_id) const {
    std::shared_lock lock(map_mutex_);
    return queues_.contains(subscriber_id);
}

std::map<std::string, SubscriptionStats> DataManager::stats() const {
    // Exclusive: blocks publishers for the copy so all counters come from one instant.
    std::unique_lock lock(map_mutex_);
    std::map<std::string, SubscriptionStats> out;
    for (const auto& [id, queue] : queues_) {
        std::lock_guard qlock(queue->mutex);
        out.emplace(id, queue->snapshot());
    }
    return out;
}

std::shared_ptr<DataManager::Queue> DataManager::find(const std::string& subscriber_id) const {
    std::shared_lock lock(map_mutex_);
    auto it = queues_.find(subscriber_id);
    if (it == queues_.end()) {
        throw Error(ErrorCode::UnknownSubscription, "no subscription '" + subscriber_id + "'");
    }
    return it->second;
}

}  // namespace reprobe
