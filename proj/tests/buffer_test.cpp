#include "agora/buffer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace agora;

namespace {

Observation obs(const std::string& id, Instant ts = 0) {
    return Observation{id, ts, "content of " + id, {}};
}

std::vector<std::string> ids(const std::vector<Observation>& v) {
    std::vector<std::string> out;
    for (const auto& o : v) {
        out.push_back(o.id);
    }
    return out;
}

ObservationBuffer three_perspective_buffer(std::optional<Instant> ttl = std::nullopt) {
    ObservationBuffer buffer({}, ttl);
    buffer.register_perspective("rel");
    buffer.register_perspective("risk");
    buffer.register_perspective("fin");
    return buffer;
}

}  // namespace

TEST(Buffer, AppendMakesEntryPending) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    EXPECT_EQ(buffer.live_count(), 1u);
    EXPECT_EQ(ids(buffer.pending_for("rel")), std::vector<std::string>{"obs-1"});
}

TEST(Buffer, HoldsAFullEngagementLog) {
    auto buffer = three_perspective_buffer();
    for (int i = 1; i <= 8; ++i) {
        buffer.append(obs("obs-" + std::to_string(i)));
    }
    EXPECT_EQ(buffer.live_count(), 8u);
    EXPECT_EQ(buffer.pending_for("fin").size(), 8u);
}

TEST(Buffer, DuplicateAppendIsRejected) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    EXPECT_THROW(buffer.append(obs("obs-1")), DuplicateError);
}

TEST(Buffer, EmptyContentIsRejected) {
    auto buffer = three_perspective_buffer();
    EXPECT_THROW(buffer.append(Observation{"obs-1", 0, "", {}}), std::invalid_argument);
}

TEST(Buffer, PendingSkipsAcknowledged) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    buffer.append(obs("obs-2"));
    buffer.append(obs("obs-3"));
    buffer.acknowledge("rel", "obs-2");
    EXPECT_EQ(ids(buffer.pending_for("rel")), (std::vector<std::string>{"obs-1", "obs-3"}));
    EXPECT_EQ(buffer.pending_for("risk").size(), 3u);
}

TEST(Buffer, UnknownPerspectiveOrObservation) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    EXPECT_THROW(buffer.pending_for("ghost"), std::invalid_argument);
    EXPECT_THROW(buffer.acknowledge("ghost", "obs-1"), std::invalid_argument);
    EXPECT_THROW(buffer.acknowledge("rel", "obs-9"), std::invalid_argument);
}

TEST(Buffer, DuplicateRegistrationIsRejected) {
    auto buffer = three_perspective_buffer();
    EXPECT_THROW(buffer.register_perspective("rel"), DuplicateError);
}

TEST(Buffer, FullyAckedEntriesEvictRegardlessOfAge) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    for (const auto& p : {"rel", "risk", "fin"}) {
        buffer.acknowledge(p, "obs-1");
    }
    EXPECT_EQ(buffer.evict(0), std::vector<std::string>{"obs-1"});
    EXPECT_EQ(buffer.live_count(), 0u);
}

TEST(Buffer, TtlEvictsPartiallyAckedEntries) {
    auto buffer = three_perspective_buffer(Instant{10});
    buffer.append(obs("obs-1"));  // inserted_at = 0 under the counting clock
    buffer.acknowledge("rel", "obs-1");
    EXPECT_TRUE(buffer.evict(5).empty());   // young enough, 1 of 3 acked
    EXPECT_TRUE(buffer.evict(10).empty());  // boundary: age == TTL is retained
    EXPECT_EQ(buffer.evict(11), std::vector<std::string>{"obs-1"});
}

TEST(Buffer, NoTtlMeansOnlyAckBasedEviction) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    EXPECT_TRUE(buffer.evict(1'000'000).empty());
}

TEST(Buffer, EvictionIsPermanent) {
    auto buffer = three_perspective_buffer();
    buffer.append(obs("obs-1"));
    for (const auto& p : {"rel", "risk", "fin"}) {
        buffer.acknowledge(p, "obs-1");
    }
    buffer.evict(0);
    EXPECT_THROW(buffer.acknowledge("rel", "obs-1"), std::invalid_argument);
    EXPECT_THROW(buffer.append(obs("obs-1")), DuplicateError);
    EXPECT_TRUE(buffer.pending_for("rel").empty());
}

TEST(Buffer, LateRegistrationSeesLiveEntries) {
    ObservationBuffer buffer;
    buffer.register_perspective("rel");
    buffer.append(obs("obs-1"));
    buffer.register_perspective("risk");
    EXPECT_EQ(buffer.pending_for("risk").size(), 1u);
    buffer.acknowledge("rel", "obs-1");
    EXPECT_TRUE(buffer.evict(0).empty());  // risk has not acked yet
}

// Liveness: if every perspective acks every observation before any
// eviction pass, nothing is evicted unprocessed.
TEST(Buffer, NothingEvictsUnprocessedWhenEveryoneKeepsUp) {
    auto buffer = three_perspective_buffer(Instant{100});
    for (int i = 1; i <= 5; ++i) {
        buffer.append(obs("obs-" + std::to_string(i)));
        for (const auto& p : {"rel", "risk", "fin"}) {
            for (const auto& pending : buffer.pending_for(p)) {
                buffer.acknowledge(p, pending.id);
            }
        }
        const auto evicted = buffer.evict(static_cast<Instant>(i));
        EXPECT_EQ(evicted.size(), 1u);  // the freshly acked entry, nothing else
    }
    EXPECT_EQ(buffer.live_count(), 0u);
}

// Replay oracle: pending_for must equal {appended} - {acked by p} -
// {evicted}, recomputed naively from the event log.
TEST(Buffer, PendingMatchesEventLogReplay) {
    std::mt19937 rng(20260810);
    const std::vector<std::string> perspectives{"p0", "p1", "p2"};

    for (int trial = 0; trial < 50; ++trial) {
        Instant clock = 0;
        ObservationBuffer buffer([&clock] { return clock; }, Instant{20});
        for (const auto& p : perspectives) {
            buffer.register_perspective(p);
        }

        std::vector<std::string> appended;
        std::map<std::string, std::set<std::string>> acked;
        std::set<std::string> evicted;
        std::map<std::string, Instant> inserted_at;

        std::uniform_int_distribution<int> op_dist(0, 3);
        std::uniform_int_distribution<std::size_t> persp_dist(0, perspectives.size() - 1);
        int next_id = 0;

        for (int step = 0; step < 60; ++step) {
            switch (op_dist(rng)) {
                case 0: {
                    const std::string id = "o" + std::to_string(next_id++);
                    buffer.append(Observation{id, clock, "x", {}});
                    appended.push_back(id);
                    inserted_at[id] = clock;
                    ++clock;
                    break;
                }
                case 1: {
                    if (appended.empty()) {
                        break;
                    }
                    std::uniform_int_distribution<std::size_t> obs_dist(0, appended.size() - 1);
                    const std::string id = appended[obs_dist(rng)];
                    const std::string p = perspectives[persp_dist(rng)];
                    if (evicted.count(id)) {
                        EXPECT_THROW(buffer.acknowledge(p, id), std::invalid_argument);
                    } else {
                        buffer.acknowledge(p, id);
                        acked[p].insert(id);
                    }
                    break;
                }
                case 2: {
                    buffer.evict(clock);
                    for (const auto& id : appended) {
                        if (evicted.count(id)) {
                            continue;
                        }
                        const bool fully_acked =
                            std::all_of(perspectives.begin(), perspectives.end(),
                                        [&](const std::string& p) {
                                            return acked[p].count(id) != 0;
                                        });
                        if (fully_acked || clock - inserted_at[id] > 20) {
                            evicted.insert(id);
                        }
                    }
                    break;
                }
                default:
                    ++clock;
                    break;
            }

            for (const auto& p : perspectives) {
                std::vector<std::string> expected;
                for (const auto& id : appended) {
                    if (!evicted.count(id) && !acked[p].count(id)) {
                        expected.push_back(id);
                    }
                }
                ASSERT_EQ(ids(buffer.pending_for(p)), expected) << "trial " << trial;
            }
        }
    }
}
