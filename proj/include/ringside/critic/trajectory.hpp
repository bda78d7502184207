#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ringside/arena/match.hpp"

namespace ringside::critic {

// One run-length element: `value` repeated `count` times.
struct Run {
    double value = 0.0;
    int count = 1;
    bool operator==(const Run&) const = default;
};
using RunSeq = std::vector<Run>;

// Compressed experience of one candidate over a set of episodes.
//  an: candidate id; rs: running win fraction after each episode;
//  fr: final reward / 100 per episode; af/aa: candidate force/angle;
//  of/oa: opponent force/angle; d2b: candidate rim-to-boundary distance
//  (min over each run); rw: candidate reward (sum over each run).
// Per episode, the six per-step arrays share one run structure.
struct CompressedTrajectory {
    std::string an;
    std::vector<double> rs;
    std::vector<double> fr;
    std::vector<RunSeq> af, aa, of, oa, d2b, rw;

    bool operator==(const CompressedTrajectory&) const = default;
};

inline constexpr const char* kTrajectoryKeys[] = {"an", "rs", "fr", "af", "aa", "of", "oa", "d2b", "rw"};

double round2(double x);

// Steps are merged while the rounded (af, aa, of, oa) tuple stays the same.
// The terminal step always closes its own run so the reward entry stays exact.
CompressedTrajectory compress_trajectory(const std::vector<arena::Transcript>& transcripts,
                                         const std::string& agent_name);

std::vector<double> expand(const RunSeq& runs);

// Running win fraction after each episode, from per-episode scores in {-1, 0, 1}.
std::vector<double> running_win_fraction(const std::vector<int>& scores);

// Runs serialize as [value, count] when count > 1, else as a bare number.
// Key order follows kTrajectoryKeys.
std::string trajectory_to_json(const CompressedTrajectory& t, int indent = -1);
// Rejects documents whose key set differs from kTrajectoryKeys.
CompressedTrajectory trajectory_from_json(const std::string& text);

}  // namespace ringside::critic
