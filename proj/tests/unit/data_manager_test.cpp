// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <deque>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "reprobe/bus/data_manager.hpp"
#include "reprobe/core/error.hpp"
#include "support.hpp"

namespace reprobe {
namespace {

using testing::make_obs;

std::vector<Observation> one(const Observation& o) { return {o}; }

TEST(TopicFilter, PrefixAndExact) {
    TopicFilter f({"sys.*", "app.http"});
    EXPECT_TRUE(f.matches("sys.cpu"));
    EXPECT_TRUE(f.matches("sys."));
    EXPECT_TRUE(f.matches("app.http"));
    EXPECT_FALSE(f.matches("app.https"));
    EXPECT_FALSE(f.matches("sy"));
    EXPECT_TRUE(TopicFilter({"*"}).matches("anything"));
    EXPECT_THROW(TopicFilter({"a*b"}), Error);
    EXPECT_THROW(TopicFilter({""}), Error);
}

TEST(DataManager, SubscribeAndPrefixMatch) {
    DataManager dm;
    dm.subscribe("pubA", TopicFilter({"sys.*"}), 1024);
    auto report = dm.publish(one(make_obs("cpu", 1, 1, "sys.cpu")));
    EXPECT_EQ(report.subscribers["pubA"].delivered, 1u);
    EXPECT_EQ(dm.drain("pubA", 10).size(), 1u);
}

TEST(DataManager, DuplicateSubscriberAndCapacity) {
    DataManager dm;
    dm.subscribe("pubA", TopicFilter({"sys.*"}), 4);
    try {
        dm.subscribe("pubA", TopicFilter({"app.*"}), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateSubscriber);
    }
    try {
        dm.subscribe("pubB", TopicFilter({"app.*"}), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidCapacity);
    }
}

TEST(DataManager, FanOutToEveryMatchingSubscriber) {
    DataManager dm;
    dm.subscribe("a", TopicFilter({"sys.*"}), 8);
    dm.subscribe("b", TopicFilter({"*"}), 8);
    const auto o = make_obs("cpu", 1, 1, "sys.cpu");
    auto report = dm.publish(one(o));
    EXPECT_EQ(report.total_delivered(), 2u);
    EXPECT_EQ(dm.drain("a", 8), one(o));
    EXPECT_EQ(dm.drain("b", 8), one(o));
}

TEST(DataManager, DropOldestWhenFull) {
    DataManager dm;
    dm.subscribe("a", TopicFilter({"*"}), 2);
    std::vector<Observation> batch = {make_obs("x", 1, 1), make_obs("x", 2, 2), make_obs("x", 3, 3)};
    auto report = dm.publish(batch);
    EXPECT_EQ(report.subscribers["a"].dropped, 1u);
    auto stats = dm.stats().at("a");
    EXPECT_EQ(stats.depth, 2u);
    EXPECT_EQ(stats.dropped, 1u);
    auto out = dm.drain("a", 10);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].value, 2);
    EXPECT_EQ(out[1].value, 3);
}

TEST(DataManager, NoMatchingSubscriber) {
    DataManager dm;
    auto report = dm.publish(one(make_obs("x", 1, 1)));
    EXPECT_EQ(report.total_delivered(), 0u);
    EXPECT_TRUE(report.subscribers.empty());
    EXPECT_TRUE(dm.stats().empty());
}

TEST(DataManager, FifoDrain) {
    DataManager dm;
    dm.subscribe("a", TopicFilter({"*"}), 8);
    std::vector<Observation> batch = {make_obs("a", 1, 1), make_obs("b", 2, 2), make_obs("c", 3, 3)};
    dm.publish(batch);
    auto first = dm.drain("a", 2);
    auto second = dm.drain("a", 2);
    ASSERT_EQ(first.size(), 2u);
    EXPECT_EQ(first[0].indicator, "a");
    EXPECT_EQ(first[1].indicator, "b");
    ASSERT_EQ(second.size(), 1u);
    EXPECT_EQ(second[0].indicator, "c");
    EXPECT_TRUE(dm.drain("a", 2).empty());
    EXPECT_THROW(dm.drain("zzz", 1), Error);
}

TEST(DataManager, UnsubscribeStopsDelivery) {
    DataManager dm;
    dm.subscribe("a", TopicFilter({"*"}), 8);
    dm.unsubscribe("a");
    EXPECT_EQ(dm.publish(one(make_obs("x", 1, 1))).total_delivered(), 0u);
    try {
        dm.unsubscribe("a");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownSubscription);
    }
}

TEST(DataManager, UpdateShrinksAndRefilters) {
    DataManager dm;
    dm.subscribe("a", TopicFilter({"*"}), 8);
    for (int i = 0; i < 5; ++i) dm.publish(one(make_obs("x", i, i + 1)));
    dm.update("a", TopicFilter({"app.*"}), 2);
    auto s = dm.stats().at("a");
    EXPECT_EQ(s.depth, 2u);
    EXPECT_EQ(s.dropped, 3u);
    dm.publish(one(make_obs("x", 9, 9, "sys.cpu")));
    EXPECT_EQ(dm.stats().at("a").enqueued, 5u);
}

// Reference model: one deque per subscriber with explicit drop-oldest.
struct ModelQueue {
    std::vector<std::string> filter;
    std::size_t capacity = 0;
    std::deque<Observation> items;
    std::uint64_t enqueued = 0, drained = 0, dropped = 0;
    bool matches(const std::string& topic) const {
        for (const auto& p : filter) {
            if (p.back() == '*') {
                if (topic.compare(0, p.size() - 1, p, 0, p.size() - 1) == 0 && topic.size() >= p.size() - 1) return true;
            } else if (p == topic) {
                return true;
            }
        }
        return false;
    }
};

TEST(DataManagerProperty, MatchesDequeModelOverRandomOps) {
    std::mt19937_64 rng(99);
    const std::vector<std::string> topics = {"sys.cpu", "sys.net", "app.http", "app.db", "other"};
    const std::vector<std::vector<std::string>> filters = {{"sys.*"}, {"app.*"}, {"*"}, {"app.http", "sys.net"}};
    const std::vector<std::string> ids = {"p0", "p1", "p2", "p3"};
    DataManager dm;
    std::map<std::string, ModelQueue> model;
    std::uniform_int_distribution<int> op(0, 9), pick_id(0, 3), pick_topic(0, 4), pick_filter(0, 3),
        cap(1, 6), batch(1, 5), maxd(0, 6);
    std::int64_t ts = 1;
    for (int step = 0; step < 10000; ++step) {
        const int o = op(rng);
        const std::string id = ids[pick_id(rng)];
        if (o == 0) {
            const auto f = filters[pick_filter(rng)];
            const std::size_t c = cap(rng);
            if (model.contains(id)) {
                EXPECT_THROW(dm.subscribe(id, TopicFilter(f), c), Error);
            } else {
                dm.subscribe(id, TopicFilter(f), c);
                model[id] = ModelQueue{f, c, {}, 0, 0, 0};
            }
        } else if (o == 1) {
            if (model.contains(id)) {
                dm.unsubscribe(id);
                model.erase(id);
            } else {
                EXPECT_THROW(dm.unsubscribe(id), Error);
            }
        } else if (o <= 6) {
            std::vector<Observation> b;
            for (int i = batch(rng); i > 0; --i) b.push_back(make_obs("v", static_cast<double>(ts), ts, topics[pick_topic(rng)]));
            ++ts;
            dm.publish(b);
            for (auto& [mid, q] : model) {
                for (const auto& obs : b) {
                    if (!q.matches(obs.topic)) continue;
                    q.items.push_back(obs);
                    ++q.enqueued;
                    if (q.items.size() > q.capacity) {
                        q.items.pop_front();
                        ++q.dropped;
                    }
                }
            }
        } else {
            const std::size_t m = maxd(rng);
            if (!model.contains(id)) {
                EXPECT_THROW(dm.drain(id, m), Error);
                continue;
            }
            auto got = dm.drain(id, m);
            auto& q = model[id];
            std::vector<Observation> want;
            while (want.size() < m && !q.items.empty()) {
                want.push_back(q.items.front());
                q.items.pop_front();
            }
            q.drained += want.size();
            ASSERT_EQ(got, want) << "step " << step;
        }
        const auto stats = dm.stats();
        ASSERT_EQ(stats.size(), model.size());
        for (const auto& [sid, s] : stats) {
            const auto& q = model.at(sid);
            ASSERT_LE(s.depth, s.capacity);
            ASSERT_EQ(s.depth, q.items.size());
            ASSERT_EQ(s.enqueued, q.enqueued);
            ASSERT_EQ(s.drained, q.drained);
            ASSERT_EQ(s.dropped, q.dropped);
            ASSERT_EQ(s.enqueued, s.drained + s.depth + s.dropped);
        }
    }
}

TEST(DataManager, ConcurrentPublishersConserveCounts) {
    DataManager dm;
    dm.subscribe("sink", TopicFilter({"*"}), 64);
    std::atomic<bool> stop{false};
    std::uint64_t drained = 0;
    std::thread consumer([&] {
        while (!stop) drained += dm.drain("sink", 16).size();
    });
    std::vector<std::thread> producers;
    for (int t = 0; t < 4; ++t) {
        producers.emplace_back([&, t] {
            for (int i = 0; i < 2000; ++i) dm.publish(one(make_obs("x", i, i + 1, "t" + std::to_string(t))));
        });
    }
    for (auto& p : producers) p.join();
    stop = true;
    consumer.join();
    const auto s = dm.stats().at("sink");
    EXPECT_EQ(s.enqueued, 8000u);
    EXPECT_EQ(s.drained, drained);
    EXPECT_EQ(s.enqueued, s.drained + s.depth + s.dropped);
}

}  // namespace
}  // namespace reprobe
