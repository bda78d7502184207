#include <filesystem>

#include <gtest/gtest.h>
#include <unistd.h>

#include "ringside/common/errors.hpp"
#include "ringside/pools/pool.hpp"

using namespace ringside;
using namespace ringside::pools;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ringside_pool_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

IdClock fixed_clock() { return IdClock(*parse_policy_id("20260101_000000")); }

PolicyRecord heuristic_record(const std::string& id, double elo, const std::string& created) {
    PolicyRecord r;
    r.id = id;
    r.source = "policy = heuristic\naggression = 0.5\n";
    r.source_ref = source_filename(r.source);
    r.backend = backend_for_source(r.source);
    r.elo = elo;
    r.created_at = created;
    return r;
}

}  // namespace

TEST(Ids, FormatAndParse) {
    EXPECT_TRUE(is_policy_id("20250801_143000"));
    EXPECT_FALSE(is_policy_id("2025081_143000"));
    IdClock clock = fixed_clock();
    EXPECT_EQ(clock.next({}), "20260101_000000");
    EXPECT_EQ(clock.next({"20260101_000001"}), "20260101_000002");
}

TEST(GlobalPool, InitCreatesRandomMember) {
    TempDir d;
    IdClock clock = fixed_clock();
    auto pool = GlobalPool::init_global(d.path, clock);
    ASSERT_EQ(pool.size(), 1u);
    const auto r = pool.members().front();
    EXPECT_EQ(r.source, kRandomSource);
    EXPECT_EQ(r.elo, 1200.0);
    EXPECT_TRUE(fs::exists(d.path / "elo.csv"));
    // reopening leaves it untouched
    auto again = GlobalPool::init_global(d.path, clock);
    EXPECT_EQ(again.ids(), pool.ids());
}

TEST(GlobalPool, OpenMissingIsStorageError) {
    TempDir d;
    EXPECT_THROW(GlobalPool::open(d.path), StorageError);
}

TEST(GlobalPool, AddGetConflict) {
    TempDir d;
    IdClock clock = fixed_clock();
    auto pool = GlobalPool::init_global(d.path, clock);
    const auto r = heuristic_record("20260102_000000", 1200, "2026-01-02T00:00:00Z");
    pool.add(r);
    EXPECT_EQ(pool.get(r.id), r);
    EXPECT_THROW(pool.add(r), ConflictError);
    EXPECT_THROW(pool.get("20990101_000000"), LookupError);
}

TEST(LocalPool, SeedsAreTopRatedNewestFirstOnTies) {
    TempDir d;
    IdClock clock = fixed_clock();
    auto pool = GlobalPool::init_global(d.path, clock);
    pool.add(heuristic_record("20260102_000000", 1300, "2026-01-02T00:00:00Z"));
    pool.add(heuristic_record("20260103_000000", 1300, "2026-01-03T00:00:00Z"));
    pool.add(heuristic_record("20260104_000000", 1250, "2026-01-04T00:00:00Z"));
    pool.add(heuristic_record("20260105_000000", 1100, "2026-01-05T00:00:00Z"));
    LocalPool local(d.path);
    const auto seeds = seed_local(pool, local, 3);
    ASSERT_EQ(seeds.size(), 3u);
    EXPECT_EQ(seeds[0].id, "20260103_000000");
    EXPECT_EQ(seeds[1].id, "20260102_000000");
    EXPECT_EQ(seeds[2].id, "20260104_000000");
    EXPECT_EQ(local.seeds().size(), 3u);
}

TEST(LocalPool, PromotionGateIsInclusive) {
    TempDir d;
    IdClock clock = fixed_clock();
    auto pool = GlobalPool::init_global(d.path, clock);
    LocalPool local(d.path);
    auto rec = heuristic_record("20260106_000000", 1200, "2026-01-06T00:00:00Z");
    const auto below = local.record_candidate(rec, {}, rating::MatchStats::from_counts(5, 1, 4));  // 0.55
    EXPECT_THROW(promote(below, pool, 0.6, 1), GateViolation);
    EXPECT_FALSE(pool.contains(rec.id));

    rec.id = "20260107_000000";
    const auto at = local.record_candidate(rec, {}, rating::MatchStats::from_counts(6, 0, 4));  // exactly 0.6
    const auto promoted = promote(at, pool, 0.6, 1);
    EXPECT_TRUE(pool.contains(rec.id));
    EXPECT_EQ(promoted.promotion_win_fraction, 0.6);
    EXPECT_EQ(promoted.promotion_iteration, 1);
    EXPECT_EQ(pool.get(rec.id).elo, 1200.0);
}

TEST(LocalPool, CandidatesKeepTrajectoriesAndReflection) {
    TempDir d;
    IdClock clock = fixed_clock();
    GlobalPool::init_global(d.path, clock);
    LocalPool local(d.path);
    critic::CompressedTrajectory t;
    t.an = "20260108_000000";
    t.rs = {1.0};
    t.fr = {1.0};
    t.af = t.aa = t.of = t.oa = t.d2b = t.rw = {{{1.0, 2}}};
    auto rec = heuristic_record("20260108_000000", 1200, "2026-01-08T00:00:00Z");
    local.record_candidate(rec, {t}, rating::MatchStats::from_counts(1, 0, 0));
    EXPECT_THROW(local.record_candidate(rec, {t}, rating::MatchStats::from_counts(1, 0, 0)), ConflictError);
    local.set_reflection(rec.id, "#Reflection: fine\n");
    const auto e = local.find(rec.id);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->trajectories.front(), t);
    EXPECT_EQ(e->reflection, "#Reflection: fine\n");
    EXPECT_EQ(local.trajectory_documents(rec.id).size(), 1u);

    reset_local(local, d.path / "history" / "archive");
    EXPECT_TRUE(local.empty());
    EXPECT_TRUE(fs::exists(d.path / "history" / "archive" / rec.id / "meta.json"));
}

TEST(PoolLock, SecondLockFailsAndStaleLockIsTaken) {
    TempDir d;
    fs::create_directories(d.path);
    {
        PoolLock lock(d.path);
        EXPECT_THROW(PoolLock again(d.path), ConflictError);
    }
    // lock owned by a pid that cannot exist
    write_file_atomic(d.path / "run.lock", "999999999\n");
    EXPECT_NO_THROW(PoolLock taken(d.path));
}
