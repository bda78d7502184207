#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ringside::arena {

// World frame is screen-like: +y points down, so a positive rotation turns
// clockwise on screen and toward the observation's right-hand columns.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(Vec2 o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

enum class Team : std::uint8_t { team_0 = 0, team_1 = 1 };

constexpr int index_of(Team t) { return static_cast<int>(t); }
constexpr Team other(Team t) { return t == Team::team_0 ? Team::team_1 : Team::team_0; }
std::string_view to_string(Team t);
Team team_from_string(std::string_view s);

// Observation color codes.
namespace cell {
constexpr std::uint8_t empty = 0;
constexpr std::uint8_t boundary = 1;
constexpr std::uint8_t aux_line = 2;
constexpr std::uint8_t center_zone = 4;
constexpr std::uint8_t team_1 = 8;
constexpr std::uint8_t team_0 = 10;
}  // namespace cell

constexpr std::uint8_t team_color(Team t) { return t == Team::team_0 ? cell::team_0 : cell::team_1; }

struct Action {
    double force = 0.0;
    double angle_delta = 0.0;  // degrees

    bool operator==(const Action&) const = default;
};

struct AgentState {
    Vec2 position;
    Vec2 velocity;
    double heading = 0.0;  // degrees from +x toward +y
    double energy = 0.0;
    Team team = Team::team_0;
    bool fatigued = false;

    bool operator==(const AgentState&) const = default;
};

enum class Outcome : std::uint8_t { ongoing, team_0_win, team_1_win, draw };

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

struct EnvState {
    std::array<AgentState, 2> agents;
    int step = 0;
    Outcome outcome = Outcome::ongoing;

    bool operator==(const EnvState&) const = default;
};

// Row-major obs_size x obs_size grid in the agent's forward-facing frame.
// Row 0 is farthest ahead; column obs_size/2 is straight ahead.
struct Observation {
    int size = 0;
    std::vector<std::uint8_t> agent_obs;
    Team id = Team::team_0;
    double energy = 0.0;
    Vec2 speed;
    int controlled_player_index = 0;

    std::uint8_t at(int row, int col) const { return agent_obs[row * size + col]; }
};

struct StepResult {
    std::array<Observation, 2> observations;
    std::array<double, 2> rewards{0.0, 0.0};
    bool done = false;
    Outcome outcome = Outcome::ongoing;
};

}  // namespace ringside::arena
