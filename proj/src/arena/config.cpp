#include "ringside/arena/config.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "ringside/common/errors.hpp"

namespace ringside::arena {

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) throw ConfigError(std::string("invalid environment config: ") + invariant);
}

}  // namespace

void EnvConfig::validate() const {
    require(std::isfinite(arena_radius) && arena_radius > 0, "arena_radius > 0");
    require(agent_radius > 0, "agent_radius > 0");
    require(arena_radius > 2 * agent_radius, "arena_radius > 2 * agent_radius");
    require(agent_mass > 0, "agent_mass > 0");
    require(decay_factor > 0 && decay_factor <= 1, "0 < decay_factor <= 1");
    require(v_max > 0, "v_max > 0");
    require(force_min < force_max, "force_min < force_max");
    require(angle_min < angle_max, "angle_min < angle_max");
    require(energy_max > 0, "energy_max > 0");
    require(energy_recovery_rate >= 0, "energy_recovery_rate >= 0");
    require(energy_cost_coeff >= 0, "energy_cost_coeff >= 0");
    require(unfatigue_fraction >= 0 && unfatigue_fraction < 1, "0 <= unfatigue_fraction < 1");
    require(restitution >= 0 && restitution <= 1, "0 <= restitution <= 1");
    require(friction_coeff >= 0, "friction_coeff >= 0");
    require(max_steps >= 1, "max_steps >= 1");
    require(obs_size == 40, "obs_size = 40");
    require(cell_scale > 0, "cell_scale > 0");
    require(start_offset_fraction > 0 &&
                start_offset() + agent_radius < arena_radius,
            "agents must start strictly inside the ring");
}

void to_json(nlohmann::json& j, const EnvConfig& c) {
    j = nlohmann::json{{"arena_radius", c.arena_radius},
                       {"agent_radius", c.agent_radius},
                       {"agent_mass", c.agent_mass},
                       {"decay_factor", c.decay_factor},
                       {"v_max", c.v_max},
                       {"force_min", c.force_min},
                       {"force_max", c.force_max},
                       {"angle_min", c.angle_min},
                       {"angle_max", c.angle_max},
                       {"energy_max", c.energy_max},
                       {"energy_recovery_rate", c.energy_recovery_rate},
                       {"energy_cost_coeff", c.energy_cost_coeff},
                       {"unfatigue_fraction", c.unfatigue_fraction},
                       {"restitution", c.restitution},
                       {"friction_coeff", c.friction_coeff},
                       {"start_offset_fraction", c.start_offset_fraction},
                       {"max_steps", c.max_steps},
                       {"obs_size", c.obs_size},
                       {"cell_scale", c.cell_scale},
                       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
    EnvConfig d;
    c.arena_radius = j.value("arena_radius", d.arena_radius);
    c.agent_radius = j.value("agent_radius", d.agent_radius);
    c.agent_mass = j.value("agent_mass", d.agent_mass);
    c.decay_factor = j.value("decay_factor", d.decay_factor);
    c.v_max = j.value("v_max", d.v_max);
    c.force_min = j.value("force_min", d.force_min);
    c.force_max = j.value("force_max", d.force_max);
    c.angle_min = j.value("angle_min", d.angle_min);
    c.angle_max = j.value("angle_max", d.angle_max);
    c.energy_max = j.value("energy_max", d.energy_max);
    c.energy_recovery_rate = j.value("energy_recovery_rate", d.energy_recovery_rate);
    c.energy_cost_coeff = j.value("energy_cost_coeff", d.energy_cost_coeff);
    c.unfatigue_fraction = j.value("unfatigue_fraction", d.unfatigue_fraction);
    c.restitution = j.value("restitution", d.restitution);
    c.friction_coeff = j.value("friction_coeff", d.friction_coeff);
    c.start_offset_fraction = j.value("start_offset_fraction", d.start_offset_fraction);
    c.max_steps = j.value("max_steps", d.max_steps);
    c.obs_size = j.value("obs_size", d.obs_size);
    c.cell_scale = j.value("cell_scale", d.cell_scale);
    c.seed = j.value("seed", d.seed);
}

}  // namespace ringside::arena
