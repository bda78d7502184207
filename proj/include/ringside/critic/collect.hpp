#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ringside/arena/config.hpp"
#include "ringside/arena/match.hpp"
#include "ringside/common/random.hpp"
#include "ringside/critic/trajectory.hpp"
#include "ringside/rating/elo.hpp"
#include "ringside/rating/stats.hpp"
#include "ringside/runtime/spec.hpp"

namespace ringside::critic {

// Maps a global-pool id to the spec that runs it.
using SpecResolver = std::function<runtime::PolicySpec(const std::string& id)>;

struct CollectOptions {
    int k = 3;    // opponents
    int L = 10;   // episodes in total, split evenly over the opponents
    double temperature = rating::kDefaultTemperature;
    std::uint64_t seed = 0;
    int threads = 1;
    arena::EnvConfig env;
};

struct CollectResult {
    CompressedTrajectory trajectory;
    rating::MatchStats stats;
    std::vector<std::string> opponents;     // in sampling order
    std::vector<arena::MatchRecord> records;  // with transcripts
};

// Episodes per opponent: L / k, the first L % k opponents get one more.
std::vector<int> split_episodes(int L, int k);

// Candidate faults count as losses; nothing here throws for policy problems.
// Throws RequestError when k exceeds the table size.
CollectResult collect_trajectories(const std::string& candidate_id, const runtime::PolicySpec& candidate,
                                   const rating::EloTable& table, const SpecResolver& resolve,
                                   const CollectOptions& options, Rng& rng);

}  // namespace ringside::critic
