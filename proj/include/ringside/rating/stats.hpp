#pragma once

#include <string>
#include <vector>

#include "ringside/arena/match.hpp"

namespace ringside::rating {

struct MatchStats {
    int wins = 0;
    int draws = 0;
    int losses = 0;
    int L = 0;
    double score_avg = 0.0;     // mean of s in {-1, 0, 1}
    double win_fraction = 0.0;  // (wins + draws / 2) / L

    static MatchStats from_counts(int wins, int draws, int losses);
    bool operator==(const MatchStats&) const = default;
};

// Stats of `policy_id` over records that all involve it.
MatchStats compute_stats(const std::vector<arena::MatchRecord>& records, const std::string& policy_id);

}  // namespace ringside::rating
