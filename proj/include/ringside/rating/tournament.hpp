#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ringside/arena/match.hpp"
#include "ringside/rating/elo.hpp"

namespace ringside::rating {

struct TournamentConfig {
    int n = 4;  // participants sampled per round; clipped to the pool size
    int t = 4;  // worker threads
    int matches_per_pair = 10;
    double k_factor = 32.0;
    std::uint64_t base_seed = 0;

    // Throws ConfigError.
    void validate() const;
};

struct MatchJob {
    std::string match_id;
    std::string team_0;
    std::string team_1;
    std::uint64_t seed = 0;
    int pair_index = 0;
    int match_index = 0;
};

// Must be safe to call concurrently. Faults are expected to come back as
// forfeit records; an exception aborts the tournament after all workers stop.
using MatchFn = std::function<arena::MatchRecord(const MatchJob&)>;

struct TournamentResult {
    EloTable table;
    std::vector<std::string> participants;  // sorted
    std::vector<arena::MatchRecord> records;  // canonical (pair, match) order
};

// Participants are drawn uniformly without replacement from `pool`, then
// sorted. Every unordered pair plays matches_per_pair games, alternating
// sides. Ratings start from `initial` and are updated in canonical order
// after every match has returned.
std::vector<MatchJob> plan_tournament(const std::vector<std::string>& pool, const TournamentConfig& config);

TournamentResult run_tournament(const std::vector<std::string>& pool, const EloTable& initial,
                                const TournamentConfig& config, const MatchFn& match_fn);

// Runs fn(0..count-1) on up to `threads` workers. Rethrows the first failure.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace ringside::rating
