#include "ringside/rating/elo.hpp"

#include <algorithm>
#include <cmath>

#include "ringside/common/errors.hpp"

namespace ringside::rating {

double expected_score(double r_a, double r_b) {
    return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / 400.0));
}

std::pair<double, double> update_elo(double r_a, double r_b, double s_a, double k) {
    if (s_a != 0.0 && s_a != 0.5 && s_a != 1.0) {
        throw ContractViolation("actual score must be 0, 0.5 or 1, got " + std::to_string(s_a));
    }
    // One delta applied with opposite signs keeps the update exactly zero-sum.
    const double delta = k * (s_a - expected_score(r_a, r_b));
    return {r_a + delta, r_b - delta};
}

double EloTable::rating(const std::string& id) const {
    auto it = ratings.find(id);
    if (it == ratings.end()) throw LookupError("no rating for policy " + id);
    return it->second;
}

void EloTable::ensure(const std::string& id) { ratings.try_emplace(id, initial_rating); }

void EloTable::record(const std::string& a, const std::string& b, double s_a) {
    ensure(a);
    ensure(b);
    auto [ra, rb] = update_elo(ratings[a], ratings[b], s_a, k_factor);
    ratings[a] = ra;
    ratings[b] = rb;
}

std::vector<std::string> EloTable::ids() const {
    std::vector<std::string> out;
    out.reserve(ratings.size());
    for (const auto& [id, _] : ratings) out.push_back(id);
    return out;
}

std::vector<double> selection_probabilities(const std::vector<double>& ratings, double temperature) {
    if (!(temperature > 0.0)) throw ContractViolation("temperature must be > 0");
    if (ratings.empty()) return {};
    const double top = *std::max_element(ratings.begin(), ratings.end());
    std::vector<double> w(ratings.size());
    double total = 0.0;
    for (std::size_t i = 0; i < ratings.size(); ++i) {
        w[i] = std::exp((ratings[i] - top) / temperature);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

std::vector<std::string> softmax_sample(const EloTable& table, std::size_t k, double temperature, Rng& rng) {
    if (k == 0) throw RequestError("softmax_sample needs k >= 1");
    if (k > table.ratings.size()) {
        throw RequestError("cannot sample " + std::to_string(k) + " opponents from a pool of " +
                           std::to_string(table.ratings.size()));
    }
    std::vector<std::string> ids = table.ids();
    std::vector<double> ratings;
    for (const auto& id : ids) ratings.push_back(table.ratings.at(id));

    std::vector<std::string> chosen;
    while (chosen.size() < k) {
        const std::vector<double> p = selection_probabilities(ratings, temperature);
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t pick = p.size() - 1;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        chosen.push_back(ids[pick]);
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(pick));
        ratings.erase(ratings.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return chosen;
}

}  // namespace ringside::rating
