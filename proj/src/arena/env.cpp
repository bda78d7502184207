#include "ringside/arena/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ringside/common/errors.hpp"
#include "ringside/common/random.hpp"

namespace ringside::arena {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double wrap_degrees(double deg) {
    deg = std::fmod(deg, 360.0);
    if (deg <= -180.0) deg += 360.0;
    if (deg > 180.0) deg -= 360.0;
    return deg;
}

Vec2 cap_speed(Vec2 v, double v_max) {
    const double speed = v.norm();
    if (speed > v_max) return v * (v_max / speed);
    return v;
}

}  // namespace

std::string_view to_string(Team t) { return t == Team::team_0 ? "team_0" : "team_1"; }

Team team_from_string(std::string_view s) {
    if (s == "team_0") return Team::team_0;
    if (s == "team_1") return Team::team_1;
    throw ContractViolation("unknown team id '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::ongoing: return "ongoing";
        case Outcome::team_0_win: return "team_0_win";
        case Outcome::team_1_win: return "team_1_win";
        case Outcome::draw: return "draw";
    }
    return "ongoing";
}

Outcome outcome_from_string(std::string_view s) {
    if (s == "ongoing") return Outcome::ongoing;
    if (s == "team_0_win") return Outcome::team_0_win;
    if (s == "team_1_win") return Outcome::team_1_win;
    if (s == "draw") return Outcome::draw;
    throw ContractViolation("unknown outcome '" + std::string(s) + "'");
}

LocalPoint cell_center_local(const EnvConfig& config, int row, int col) {
    const int n = config.obs_size;
    return {(n - kRowsBehind - row - 0.5) * config.cell_scale,
            (col - n / 2 + 0.5) * config.cell_scale};
}

double boundary_inner_radius(const EnvConfig& c) { return c.arena_radius - 2.0 * c.cell_scale; }
double boundary_outer_radius(const EnvConfig& c) { return c.arena_radius + 2.0 * c.cell_scale; }
double aux_line_radius(const EnvConfig& c) { return c.start_offset(); }
double center_zone_radius(const EnvConfig& c) { return 0.2 * c.arena_radius; }

Action clamp_action(const Action& raw, const EnvConfig& config) {
    if (!std::isfinite(raw.force) || !std::isfinite(raw.angle_delta)) {
        throw PolicyFault("non-finite action component",
                          "action = [" + std::to_string(raw.force) + ", " +
                              std::to_string(raw.angle_delta) + "]");
    }
    return {std::clamp(raw.force, config.force_min, config.force_max),
            std::clamp(raw.angle_delta, config.angle_min, config.angle_max)};
}

double distance_to_boundary(const EnvConfig& config, const AgentState& agent) {
    return config.arena_radius - agent.position.norm() - config.agent_radius;
}

Observation render_observation(const EnvConfig& config, const EnvState& state, int agent_index) {
    const AgentState& self = state.agents[agent_index];
    const AgentState& opp = state.agents[1 - agent_index];
    const int n = config.obs_size;

    Observation obs;
    obs.size = n;
    obs.agent_obs.assign(static_cast<std::size_t>(n) * n, cell::empty);
    obs.id = self.team;
    obs.energy = self.energy;
    obs.speed = self.velocity;
    obs.controlled_player_index = agent_index;

    const double theta = self.heading * kDegToRad;
    const Vec2 fwd{std::cos(theta), std::sin(theta)};
    const Vec2 right{-std::sin(theta), std::cos(theta)};

    const double r_agent2 = config.agent_radius * config.agent_radius;
    const double b_in2 = std::pow(boundary_inner_radius(config), 2);
    const double b_out2 = std::pow(boundary_outer_radius(config), 2);
    const double aux_r = aux_line_radius(config);
    const double aux_half = 0.75 * config.cell_scale;
    const double aux_in2 = std::pow(aux_r - aux_half, 2);
    const double aux_out2 = std::pow(aux_r + aux_half, 2);
    const double zone2 = std::pow(center_zone_radius(config), 2);

    const LocalPoint origin = cell_center_local(config, 0, 0);
    const Vec2 row_step = fwd * -config.cell_scale;
    const Vec2 col_step = right * config.cell_scale;
    Vec2 row_start = self.position + fwd * origin.forward + right * origin.right;

    for (int row = 0; row < n; ++row, row_start += row_step) {
        Vec2 p = row_start;
        for (int col = 0; col < n; ++col, p += col_step) {
            std::uint8_t code = cell::empty;
            const Vec2 d_self = p - self.position;
            const Vec2 d_opp = p - opp.position;
            if (d_self.dot(d_self) <= r_agent2) {
                code = team_color(self.team);
            } else if (d_opp.dot(d_opp) <= r_agent2) {
                code = team_color(opp.team);
            } else {
                const double rc2 = p.dot(p);
                if (rc2 >= b_in2 && rc2 <= b_out2) {
                    code = cell::boundary;
                } else if (rc2 >= aux_in2 && rc2 <= aux_out2) {
                    code = cell::aux_line;
                } else if (rc2 <= zone2) {
                    code = cell::center_zone;
                }
            }
            obs.agent_obs[static_cast<std::size_t>(row) * n + col] = code;
        }
    }
    return obs;
}

Arena::Arena(EnvConfig config) : config_(config) { config_.validate(); }

std::array<Observation, 2> Arena::reset(std::uint64_t seed) {
    Rng rng(derive_seed({seed, 0x5e7u}));
    const double axis = rng.uniform(0.0, 360.0);
    const double a = axis * kDegToRad;
    const Vec2 offset{config_.start_offset() * std::cos(a), config_.start_offset() * std::sin(a)};

    state_ = EnvState{};
    state_.agents[0] = AgentState{offset, {}, wrap_degrees(axis + 180.0), config_.energy_max,
                                  Team::team_0, false};
    state_.agents[1] = AgentState{offset * -1.0, {}, wrap_degrees(axis), config_.energy_max,
                                  Team::team_1, false};
    clamped_ = {};
    applied_ = {};
    return {observe(0), observe(1)};
}

StepResult Arena::step(const std::array<Action, 2>& actions) {
    if (state_.outcome != Outcome::ongoing) {
        throw UsageError("step called on a terminated episode");
    }

    std::array<Vec2, 2> before;
    for (int i = 0; i < 2; ++i) {
        AgentState& a = state_.agents[i];
        before[i] = a.position;
        clamped_[i] = clamp_action(actions[i], config_);
        applied_[i] = clamped_[i];
        if (a.fatigued) applied_[i].force = 0.0;

        a.heading = wrap_degrees(a.heading + applied_[i].angle_delta);
        const double theta = a.heading * kDegToRad;
        const Vec2 accel = Vec2{std::cos(theta), std::sin(theta)} * (applied_[i].force / config_.agent_mass);
        a.velocity = cap_speed((a.velocity + accel) * config_.decay_factor, config_.v_max);
        a.position += a.velocity;
    }

    resolve_collision();

    for (int i = 0; i < 2; ++i) {
        AgentState& a = state_.agents[i];
        const double displacement = (a.position - before[i]).norm();
        double e = a.energy - config_.energy_cost_coeff * std::abs(applied_[i].force) * displacement;
        if (e <= 0.0) {
            e = 0.0;
            a.fatigued = true;
        }
        e = std::min(e + config_.energy_recovery_rate, config_.energy_max);
        if (a.fatigued && e > config_.unfatigue_fraction * config_.energy_max) a.fatigued = false;
        a.energy = e;
    }

    ++state_.step;
    update_outcome();

    StepResult result;
    result.outcome = state_.outcome;
    result.done = state_.outcome != Outcome::ongoing;
    if (state_.outcome == Outcome::team_0_win) result.rewards = {100.0, 0.0};
    if (state_.outcome == Outcome::team_1_win) result.rewards = {0.0, 100.0};
    result.observations = {observe(0), observe(1)};
    return result;
}

void Arena::resolve_collision() {
    AgentState& a = state_.agents[0];
    AgentState& b = state_.agents[1];
    const double min_dist = 2.0 * config_.agent_radius;
    Vec2 delta = b.position - a.position;
    double dist = delta.norm();
    if (dist >= min_dist) return;

    Vec2 normal;
    if (dist > 1e-12) {
        normal = delta * (1.0 / dist);
    } else {
        const double theta = a.heading * kDegToRad;
        normal = {std::cos(theta), std::sin(theta)};
        dist = 0.0;
    }

    // Equal split of the overlap (equal masses by construction of the task).
    const double overlap = min_dist - dist;
    a.position -= normal * (overlap / 2.0);
    b.position += normal * (overlap / 2.0);

    const double inv_mass_sum = 2.0 / config_.agent_mass;
    const Vec2 rel = b.velocity - a.velocity;
    const double vn = rel.dot(normal);
    if (vn < 0.0) {
        const double jn = -(1.0 + config_.restitution) * vn / inv_mass_sum;
        a.velocity -= normal * (jn / config_.agent_mass);
        b.velocity += normal * (jn / config_.agent_mass);

        const Vec2 rel_after = b.velocity - a.velocity;
        Vec2 tangent = rel_after - normal * rel_after.dot(normal);
        const double vt_mag = tangent.norm();
        if (vt_mag > 1e-12) {
            tangent = tangent * (1.0 / vt_mag);
            double jt = -vt_mag / inv_mass_sum;
            jt = std::max(jt, -config_.friction_coeff * jn);
            a.velocity -= tangent * (jt / config_.agent_mass);
            b.velocity += tangent * (jt / config_.agent_mass);
        }
    }
    a.velocity = cap_speed(a.velocity, config_.v_max);
    b.velocity = cap_speed(b.velocity, config_.v_max);
}

void Arena::update_outcome() {
    const bool out0 = distance_to_boundary(config_, state_.agents[0]) <= 0.0;
    const bool out1 = distance_to_boundary(config_, state_.agents[1]) <= 0.0;
    if (out0 && out1) {
        state_.outcome = Outcome::draw;
    } else if (out0) {
        state_.outcome = Outcome::team_1_win;
    } else if (out1) {
        state_.outcome = Outcome::team_0_win;
    } else if (state_.step >= config_.max_steps) {
        state_.outcome = Outcome::draw;
    }
}

}  // namespace ringside::arena
