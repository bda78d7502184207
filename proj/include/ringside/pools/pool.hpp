#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ringside/common/files.hpp"
#include "ringside/common/timestamp.hpp"
#include "ringside/critic/trajectory.hpp"
#include "ringside/pools/record.hpp"
#include "ringside/rating/elo.hpp"
#include "ringside/rating/export.hpp"
#include "ringside/rating/stats.hpp"
#include "ringside/rating/tournament.hpp"

namespace ringside::pools {

namespace fs = std::filesystem;

inline constexpr double kDefaultPromotionThreshold = 0.6;
inline constexpr const char* kRandomSource = "policy = random\nseed = 0\n";

// On-disk layout under the pool root:
//   global/<id>/meta.json, global/<id>/source.*
//   local/<id>/meta.json, source.*, trajectory_<n>.json, reflection.md
//   history/<run>/...
//   elo.csv
class GlobalPool {
public:
    // Creates the layout if needed. An empty pool receives a single builtin
    // random policy; an existing pool is loaded untouched.
    static GlobalPool init_global(const fs::path& root, IdClock& clock, double initial_rating = 1200.0);
    // Opens an existing pool; throws StorageError if the layout is missing.
    static GlobalPool open(const fs::path& root);

    const fs::path& root() const { return root_; }
    fs::path dir() const { return root_ / "global"; }
    fs::path policy_dir(const std::string& id) const { return dir() / id; }

    // Sorted by id. Throws StorageError naming a corrupt file.
    std::vector<PolicyRecord> members() const;
    std::vector<std::string> ids() const;
    std::size_t size() const { return ids().size(); }
    bool contains(const std::string& id) const;
    // Throws LookupError.
    PolicyRecord get(const std::string& id) const;

    // Atomic insert; ConflictError if the id exists.
    void add(const PolicyRecord& record);
    // Rewrites meta.json of an existing member.
    void update(const PolicyRecord& record);

    rating::EloTable elo_table(double k_factor = 32.0, double initial_rating = 1200.0) const;
    // Stores the new ratings and adds the tournament's per-policy counts.
    void apply_tournament(const rating::TournamentResult& result);

    std::vector<rating::EloRow> elo_rows() const;
    fs::path elo_csv_path() const { return root_ / "elo.csv"; }
    void write_elo_csv() const;

private:
    explicit GlobalPool(fs::path root) : root_(std::move(root)) {}
    fs::path root_;
};

enum class LocalRole { seed, candidate };

struct LocalEntry {
    PolicyRecord record;
    LocalRole role = LocalRole::candidate;
    std::vector<critic::CompressedTrajectory> trajectories;
    std::optional<std::string> reflection;  // report markdown, verbatim
    double avg_win_fraction = 0.0;
    std::optional<rating::MatchStats> stats;
};

class LocalPool {
public:
    explicit LocalPool(fs::path pool_root);

    fs::path dir() const { return root_ / "local"; }
    std::vector<LocalEntry> entries() const;
    std::vector<LocalEntry> seeds() const;
    std::optional<LocalEntry> find(const std::string& id) const;
    bool empty() const;

    void add_seed(const PolicyRecord& record);
    // ConflictError on a duplicate id.
    LocalEntry record_candidate(const PolicyRecord& record,
                                const std::vector<critic::CompressedTrajectory>& trajectories,
                                const rating::MatchStats& stats);
    void set_reflection(const std::string& id, const std::string& markdown);
    // Raw trajectory documents of an entry, in order.
    std::vector<std::string> trajectory_documents(const std::string& id) const;

private:
    LocalEntry load(const fs::path& entry_dir) const;
    fs::path root_;
};

// Copies the min(count, size) highest-rated members into the local pool as
// seeds. Ties go to the newer policy.
std::vector<PolicyRecord> seed_local(const GlobalPool& global, LocalPool& local, int count = 3);

// Moves every local entry under `archive_dir` and leaves the local pool empty.
void reset_local(LocalPool& local, const fs::path& archive_dir);

// Gate check (inclusive), then an atomic copy into the global pool at
// `initial_rating`. Throws GateViolation below the threshold.
PolicyRecord promote(const LocalEntry& entry, GlobalPool& global, double threshold, int iteration,
                     double initial_rating = 1200.0);

// Single-run guard: `run.lock` holding the owner's pid. A lock left by a dead
// process is taken over.
class PoolLock {
public:
    explicit PoolLock(const fs::path& root);
    ~PoolLock();
    PoolLock(const PoolLock&) = delete;
    PoolLock& operator=(const PoolLock&) = delete;

private:
    fs::path path_;
};

}  // namespace ringside::pools
