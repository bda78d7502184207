#include "ringside/rating/stats.hpp"

#include "ringside/common/errors.hpp"

namespace ringside::rating {

MatchStats MatchStats::from_counts(int wins, int draws, int losses) {
    MatchStats s;
    s.wins = wins;
    s.draws = draws;
    s.losses = losses;
    s.L = wins + draws + losses;
    if (s.L == 0) throw ContractViolation("statistics over zero matches are undefined");
    s.score_avg = static_cast<double>(wins - losses) / s.L;
    s.win_fraction = (wins + 0.5 * draws) / s.L;
    return s;
}

MatchStats compute_stats(const std::vector<arena::MatchRecord>& records, const std::string& policy_id) {
    if (records.empty()) throw ContractViolation("compute_stats needs at least one match record");
    int w = 0, d = 0, l = 0;
    for (const auto& r : records) {
        const int s = r.score(r.side_of(policy_id));
        if (s > 0) ++w;
        else if (s < 0) ++l;
        else ++d;
    }
    return MatchStats::from_counts(w, d, l);
}

}  // namespace ringside::rating
