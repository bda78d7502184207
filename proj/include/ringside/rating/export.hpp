#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ringside::rating {

struct EloRow {
    std::string policy_id;
    double rating = 0.0;
    int games = 0;
    int wins = 0;
    int draws = 0;
    int losses = 0;
    std::optional<int> promotion_iteration;
};

inline constexpr const char* kEloCsvHeader =
    "policy_id,rating,games,wins,draws,losses,win_fraction,promotion_iteration";

// Rows are written in the given order. win_fraction is empty when games = 0.
void write_elo_csv(std::ostream& out, const std::vector<EloRow>& rows);
std::vector<EloRow> read_elo_csv(std::istream& in);

}  // namespace ringside::rating
