#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ringside/common/random.hpp"
#include "ringside/runtime/policy.hpp"

namespace ringside::runtime {

// Ignores the observation; draws force and angle uniformly over the action box.
class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed = 0) : seed_(seed), rng_(seed) {}

    void start(arena::Team side, const arena::EnvConfig& config, std::uint64_t match_seed) override;
    arena::Action act(const arena::Observation& observation) override;

private:
    std::uint64_t seed_;
    Rng rng_;
    arena::EnvConfig config_;
};

// Tunables of the rule-based family. Larger values are not uniformly better;
// see HeuristicPolicy for how each one is used.
struct HeuristicParams {
    double aggression = 1.0;        // fraction of force_max used when engaging, in [0, 1]
    double boundary_margin = 40.0;  // px of rim-to-boundary clearance that triggers evasion
    double energy_reserve = 20.0;   // below this energy the policy throttles down
    double turn_rate = 30.0;        // max |angle_delta| per step, degrees

    bool operator==(const HeuristicParams&) const = default;
};

// Parses the `key = value` source format emitted for heuristic policies.
// Errors are reported as a traceback-style message through PolicyFault so the
// debug loop can feed them back to the model.
HeuristicParams parse_heuristic_source(std::string_view source);
std::string format_heuristic_source(const HeuristicParams& params);

// Boundary first, then chase a visible opponent, otherwise search for the
// center zone or spin in place; throttles when energy runs low.
class HeuristicPolicy final : public Policy {
public:
    explicit HeuristicPolicy(HeuristicParams params) : params_(params) {}

    void start(arena::Team side, const arena::EnvConfig& config, std::uint64_t match_seed) override;
    arena::Action act(const arena::Observation& observation) override;

    const HeuristicParams& params() const { return params_; }

private:
    arena::Action decide(const arena::Observation& observation);
    // Forward force that brings the along-heading speed to `target` next step.
    double drive(double target, double forward_speed, double limit) const;

    HeuristicParams params_;
    arena::EnvConfig config_;
    double search_turn_ = 30.0;
    // World heading is not observed. It is recovered from the velocity after a
    // straight first push, then tracked by summing the applied steering.
    bool heading_known_ = false;
    double heading_ = 0.0;
    int steps_ = 0;
};

}  // namespace ringside::runtime
