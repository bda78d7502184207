#include <atomic>
#include <set>

#include <gtest/gtest.h>

#include "ringside/common/errors.hpp"
#include "ringside/rating/tournament.hpp"

using namespace ringside;
using namespace ringside::rating;

namespace {

// Deterministic fake: the lexicographically larger id always wins.
arena::MatchRecord fake_match(const MatchJob& job) {
    arena::MatchRecord r;
    r.match_id = job.match_id;
    r.seed = job.seed;
    r.policy_ids = {job.team_0, job.team_1};
    r.outcome = job.team_0 > job.team_1 ? arena::Outcome::team_0_win : arena::Outcome::team_1_win;
    return r;
}

EloTable fresh(const std::vector<std::string>& ids) {
    EloTable t;
    for (const auto& id : ids) t.ensure(id);
    return t;
}

}  // namespace

TEST(Tournament, PlanCoversEveryPairWithAlternatingSides) {
    TournamentConfig c;
    c.n = 4;
    c.matches_per_pair = 4;
    const auto jobs = plan_tournament({"a", "b", "c", "d", "e"}, c);
    EXPECT_EQ(jobs.size(), 6u * 4u);
    std::set<std::string> ids;
    for (const auto& j : jobs) ids.insert(j.match_id);
    EXPECT_EQ(ids.size(), jobs.size());
    for (std::size_t i = 0; i + 1 < jobs.size(); i += 2) {
        EXPECT_EQ(jobs[i].team_0, jobs[i + 1].team_1);
        EXPECT_EQ(jobs[i].team_1, jobs[i + 1].team_0);
    }
}

TEST(Tournament, ParticipantsAreClippedToThePool) {
    TournamentConfig c;
    c.n = 10;
    c.matches_per_pair = 2;
    const auto r = run_tournament({"a", "b"}, fresh({"a", "b"}), c, fake_match);
    EXPECT_EQ(r.participants, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(r.records.size(), 2u);
}

TEST(Tournament, ThreadCountDoesNotChangeResults) {
    const std::vector<std::string> pool{"p1", "p2", "p3", "p4", "p5", "p6"};
    TournamentConfig c;
    c.n = 5;
    c.base_seed = 42;
    c.t = 1;
    const auto one = run_tournament(pool, fresh(pool), c, fake_match);
    c.t = 8;
    const auto eight = run_tournament(pool, fresh(pool), c, fake_match);
    EXPECT_EQ(one.table, eight.table);
    EXPECT_EQ(one.participants, eight.participants);
}

TEST(Tournament, StrongerWinsRating) {
    const std::vector<std::string> pool{"a", "b", "c"};
    TournamentConfig c;
    c.n = 3;
    const auto r = run_tournament(pool, fresh(pool), c, fake_match);
    EXPECT_GT(r.table.rating("c"), r.table.rating("b"));
    EXPECT_GT(r.table.rating("b"), r.table.rating("a"));
    double total = 0.0;
    for (const auto& [id, v] : r.table.ratings) total += v;
    EXPECT_NEAR(total, 3 * 1200.0, 1e-9);
}

TEST(Tournament, WorkerErrorPropagates) {
    TournamentConfig c;
    c.t = 3;
    const std::vector<std::string> pool{"a", "b", "c"};
    EXPECT_THROW(run_tournament(pool, fresh(pool), c,
                                [](const MatchJob& j) -> arena::MatchRecord {
                                    if (j.pair_index == 1) throw StorageError("disk");
                                    return fake_match(j);
                                }),
                 StorageError);
}

TEST(Tournament, ConfigValidation) {
    TournamentConfig c;
    c.t = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.matches_per_pair = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ParallelFor, VisitsEachIndexOnce) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 7, [&](int i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}
