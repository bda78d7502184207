#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ringside/common/random.hpp"

namespace ringside::rating {

// Probability that a player rated r_a scores against one rated r_b.
double expected_score(double r_a, double r_b);

// Returns (r_a', r_b'). s_a must be exactly 0, 0.5 or 1.
std::pair<double, double> update_elo(double r_a, double r_b, double s_a, double k);

struct EloTable {
    std::map<std::string, double> ratings;
    double k_factor = 32.0;
    double initial_rating = 1200.0;

    bool contains(const std::string& id) const { return ratings.count(id) != 0; }
    // Throws LookupError for unknown ids.
    double rating(const std::string& id) const;
    // Inserts at initial_rating if absent.
    void ensure(const std::string& id);
    // Applies one match result; s_a is the score of `a`.
    void record(const std::string& a, const std::string& b, double s_a);

    std::vector<std::string> ids() const;
    bool operator==(const EloTable&) const = default;
};

inline constexpr double kDefaultTemperature = 100.0;

// Per-draw selection weights exp((R_i - max R) / temperature), normalized.
std::vector<double> selection_probabilities(const std::vector<double>& ratings, double temperature);

// Draws k distinct ids without replacement, reweighting after each draw.
// Ids are visited in table (sorted) order so results depend only on the rng.
std::vector<std::string> softmax_sample(const EloTable& table, std::size_t k, double temperature, Rng& rng);

}  // namespace ringside::rating
