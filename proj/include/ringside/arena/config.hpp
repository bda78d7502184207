#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

namespace ringside::arena {

// Physical and observation parameters of the sumo ring. Lengths are pixels,
// time is steps, angles are degrees.
struct EnvConfig {
    double arena_radius = 350.0;
    double agent_radius = 25.0;
    double agent_mass = 100.0;
    double decay_factor = 0.98;  // per-step velocity multiplier
    double v_max = 10.0;         // px/step
    double force_min = -100.0;
    double force_max = 200.0;
    double angle_min = -30.0;
    double angle_max = 30.0;
    double energy_max = 100.0;
    double energy_recovery_rate = 0.5;  // per step
    double energy_cost_coeff = 0.001;   // per unit of |force| * |displacement|
    double unfatigue_fraction = 0.1;    // of energy_max
    double restitution = 0.8;
    double friction_coeff = 0.2;
    double start_offset_fraction = 0.6;  // of arena_radius
    int max_steps = 500;
    int obs_size = 40;
    double cell_scale = 5.0;  // px per observation cell
    std::uint64_t seed = 0;

    // Throws ConfigError naming the first violated invariant.
    void validate() const;

    double start_offset() const { return start_offset_fraction * arena_radius; }
};

void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);

}  // namespace ringside::arena
