#pragma once

#include <array>
#include <cstdint>

#include "ringside/arena/config.hpp"
#include "ringside/arena/types.hpp"

namespace ringside::arena {

// View window: a square of obs_size cells centered laterally on the agent,
// reaching (obs_size - kRowsBehind) cells ahead and kRowsBehind cells behind.
inline constexpr int kRowsBehind = 5;

// Center of cell (row, col) in the agent's local frame, in pixels.
// `forward` is along the heading, `right` is clockwise from it.
struct LocalPoint {
    double forward;
    double right;
};
LocalPoint cell_center_local(const EnvConfig& config, int row, int col);

// Ring geometry used by the rasterizer.
double boundary_inner_radius(const EnvConfig& config);
double boundary_outer_radius(const EnvConfig& config);
double aux_line_radius(const EnvConfig& config);
double center_zone_radius(const EnvConfig& config);

// Clamps into the action box. Non-finite components raise PolicyFault.
Action clamp_action(const Action& raw, const EnvConfig& config);

Observation render_observation(const EnvConfig& config, const EnvState& state, int agent_index);

// Distance from the agent's rim to the ring boundary (negative once touching).
double distance_to_boundary(const EnvConfig& config, const AgentState& agent);

// Two-agent ring. Each instance is independent; a match owns one.
class Arena {
public:
    explicit Arena(EnvConfig config);

    std::array<Observation, 2> reset(std::uint64_t seed);

    // Applies both actions simultaneously from the same pre-step state.
    // Order per agent: clamp, fatigue gate, heading, acceleration, decay, speed
    // cap, move; then collision, energy update, termination.
    StepResult step(const std::array<Action, 2>& actions);

    const EnvState& state() const { return state_; }
    const EnvConfig& config() const { return config_; }
    // Post-clamp, post-fatigue actions of the last step.
    const std::array<Action, 2>& applied_actions() const { return applied_; }
    const std::array<Action, 2>& clamped_actions() const { return clamped_; }

    Observation observe(int agent_index) const { return render_observation(config_, state_, agent_index); }

private:
    void resolve_collision();
    void update_outcome();

    EnvConfig config_;
    EnvState state_;
    std::array<Action, 2> clamped_{};
    std::array<Action, 2> applied_{};
};

}  // namespace ringside::arena
