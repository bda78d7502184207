#include "ringside/rating/export.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ringside/common/errors.hpp"

namespace ringside::rating {

void write_elo_csv(std::ostream& out, const std::vector<EloRow>& rows) {
    out << kEloCsvHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{},{:.4f},{},{},{},{},", r.policy_id, r.rating, r.games, r.wins, r.draws, r.losses);
        if (r.games > 0) out << fmt::format("{:.4f}", (r.wins + 0.5 * r.draws) / r.games);
        out << ',';
        if (r.promotion_iteration) out << *r.promotion_iteration;
        out << '\n';
    }
}

std::vector<EloRow> read_elo_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kEloCsvHeader) throw StorageError("elo csv: unexpected header");
    std::vector<EloRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 8) throw StorageError(fmt::format("elo csv line {}: expected 8 fields", line_no));
        try {
            EloRow r;
            r.policy_id = cells[0];
            r.rating = std::stod(cells[1]);
            r.games = std::stoi(cells[2]);
            r.wins = std::stoi(cells[3]);
            r.draws = std::stoi(cells[4]);
            r.losses = std::stoi(cells[5]);
            if (!cells[7].empty()) r.promotion_iteration = std::stoi(cells[7]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw StorageError(fmt::format("elo csv line {}: bad number", line_no));
        }
    }
    return rows;
}

}  // namespace ringside::rating
