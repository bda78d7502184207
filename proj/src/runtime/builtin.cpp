#include "ringside/runtime/builtin.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"

namespace ringside::runtime {

using arena::Action;
using arena::Observation;

void RandomPolicy::start(arena::Team side, const arena::EnvConfig& config, std::uint64_t match_seed) {
    config_ = config;
    rng_ = Rng(derive_seed({seed_, match_seed, static_cast<std::uint64_t>(side)}));
}

Action RandomPolicy::act(const Observation&) {
    const double force = rng_.uniform(config_.force_min, config_.force_max);
    const double angle = rng_.uniform(config_.angle_min, config_.angle_max);
    return {force, angle};
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void source_error(int line, const std::string& kind, const std::string& msg) {
    std::ostringstream tb;
    tb << "Traceback (heuristic source):\n  line " << line << "\n" << kind << ": " << msg;
    throw PolicyFault("invalid heuristic source", tb.str());
}

double parse_number(int line, const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        source_error(line, "ValueError", "could not convert '" + text + "' to a number for '" + key + "'");
    }
    return v;
}

double to_degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

}  // namespace

HeuristicParams parse_heuristic_source(std::string_view source) {
    HeuristicParams p;
    std::istringstream in{std::string(source)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            source_error(line_no, "SyntaxError", "expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "policy") {
            if (value != "heuristic") source_error(line_no, "ValueError", "unsupported policy kind '" + value + "'");
            continue;
        }
        double* slot = nullptr;
        if (key == "aggression") slot = &p.aggression;
        else if (key == "boundary_margin") slot = &p.boundary_margin;
        else if (key == "energy_reserve") slot = &p.energy_reserve;
        else if (key == "turn_rate") slot = &p.turn_rate;
        else source_error(line_no, "NameError", "name '" + key + "' is not defined");
        *slot = parse_number(line_no, key, value);
    }
    if (p.aggression < 0.0 || p.aggression > 1.0) source_error(0, "ValueError", "aggression must be in [0, 1]");
    if (p.boundary_margin < 0.0) source_error(0, "ValueError", "boundary_margin must be >= 0");
    if (p.energy_reserve < 0.0) source_error(0, "ValueError", "energy_reserve must be >= 0");
    if (p.turn_rate <= 0.0) source_error(0, "ValueError", "turn_rate must be > 0");
    return p;
}

std::string format_heuristic_source(const HeuristicParams& p) {
    std::ostringstream os;
    os << "policy = heuristic\n"
       << "aggression = " << p.aggression << "\n"
       << "boundary_margin = " << p.boundary_margin << "\n"
       << "energy_reserve = " << p.energy_reserve << "\n"
       << "turn_rate = " << p.turn_rate << "\n";
    return os.str();
}

void HeuristicPolicy::start(arena::Team, const arena::EnvConfig& config, std::uint64_t) {
    config_ = config;
    search_turn_ = std::min(params_.turn_rate, config.angle_max);
    heading_known_ = false;
    heading_ = 0.0;
    steps_ = 0;
}

double HeuristicPolicy::drive(double target, double forward_speed, double limit) const {
    const double force = (target / config_.decay_factor - forward_speed) * config_.agent_mass;
    return std::clamp(force, config_.force_min, limit);
}

Action HeuristicPolicy::act(const Observation& obs) {
    Action action = decide(obs);
    action = arena::clamp_action(action, config_);
    heading_ += action.angle_delta;
    ++steps_;
    return action;
}

Action HeuristicPolicy::decide(const Observation& obs) {
    const double push_limit = std::max(params_.aggression * config_.force_max, 0.0);
    if (steps_ == 0) return {push_limit, 0.0};
    if (!heading_known_) {
        // after a straight push from rest the velocity points along the heading
        if (obs.speed.norm() > 1e-9) {
            heading_ = to_degrees(std::atan2(obs.speed.y, obs.speed.x));
        }
        heading_known_ = true;
    }
    const double h = heading_ * std::numbers::pi / 180.0;
    const double v_fwd = obs.speed.x * std::cos(h) + obs.speed.y * std::sin(h);

    const std::uint8_t opp_color = arena::team_color(arena::other(obs.id));
    const double agent_r = config_.agent_radius;

    double opp_f = 0.0, opp_r = 0.0;
    int opp_n = 0;
    double zone_f = 0.0, zone_r = 0.0;
    int zone_n = 0;
    double wall_dist = 1e9, wall_f = 0.0, wall_r = 0.0;

    for (int row = 0; row < obs.size; ++row) {
        for (int col = 0; col < obs.size; ++col) {
            const std::uint8_t c = obs.at(row, col);
            if (c == arena::cell::empty || c == arena::cell::aux_line) continue;
            const arena::LocalPoint p = arena::cell_center_local(config_, row, col);
            if (c == opp_color) {
                opp_f += p.forward;
                opp_r += p.right;
                ++opp_n;
            } else if (c == arena::cell::boundary) {
                const double d = std::hypot(p.forward, p.right);
                if (d < wall_dist) {
                    wall_dist = d;
                    wall_f = p.forward;
                    wall_r = p.right;
                }
            } else if (c == arena::cell::center_zone) {
                zone_f += p.forward;
                zone_r += p.right;
                ++zone_n;
            }
        }
    }

    const double max_turn = std::min(params_.turn_rate, config_.angle_max);
    auto steer = [&](double bearing_deg) { return std::clamp(bearing_deg, -max_turn, max_turn); };
    auto turned = [](double bearing_deg) {
        return bearing_deg >= 0.0 ? bearing_deg - 180.0 : bearing_deg + 180.0;
    };

    const bool tired = obs.energy < params_.energy_reserve;
    const double push = tired ? 0.3 * push_limit : push_limit;
    const double cruise = config_.v_max * (tired ? 0.3 : 0.5);

    const double clearance = wall_dist - agent_r;
    const double opp_dist = opp_n > 0 ? std::hypot(opp_f / opp_n, opp_r / opp_n) : 1e9;
    // only an opponent we are already touching can take the hit for us
    const bool opp_shields_wall = opp_n > 0 && opp_dist < wall_dist && opp_dist < 2.0 * agent_r + 3.0 &&
                                  opp_f > 0.0 && std::abs(to_degrees(std::atan2(opp_r, opp_f))) < 45.0;

    // leave room to brake: full reverse force against the speed toward the wall
    double stopping = 0.0, approach = 0.0;
    if (wall_dist < 1e8 && wall_dist > 0.0) {
        const double v_right = -obs.speed.x * std::sin(h) + obs.speed.y * std::cos(h);
        approach = (v_fwd * wall_f + v_right * wall_r) / wall_dist;
        const double brake = -config_.force_min / config_.agent_mass;
        if (approach > 0.0 && brake > 0.0) stopping = approach * approach / (2.0 * brake);
    }

    if (clearance < params_.boundary_margin + stopping && !opp_shields_wall) {
        const double wall_bearing = to_degrees(std::atan2(wall_r, wall_f));
        const double inward = turned(wall_bearing);
        if (approach < -0.5 * cruise) {
            // already pulling away: settle into a cruise toward the middle
            const double target = std::abs(inward) <= max_turn ? cruise : 0.0;
            return {drive(target, v_fwd, push), steer(inward)};
        }
        // full force along whichever end of the body points away from the wall;
        // hold the heading while braking nose-first, otherwise swing the tail to the wall
        const double along = std::cos(wall_bearing * std::numbers::pi / 180.0);
        const double force = along > 0.0 ? config_.force_min : push_limit;
        const double turn = along > 0.5 ? 0.0 : steer(inward);
        return {force, turn};
    }

    if (opp_n > 0) {
        const double bearing = to_degrees(std::atan2(opp_r / opp_n, opp_f / opp_n));
        if (std::abs(bearing) <= max_turn) return {push, steer(bearing)};
        return {drive(0.0, v_fwd, push), steer(bearing)};
    }

    // Nothing to chase: get back to the center zone, then brake and spin to scan.
    if (zone_n > 0) {
        const double zf = zone_f / zone_n;
        const double zr = zone_r / zone_n;
        if (std::hypot(zf, zr) < 2.0 * agent_r) return {drive(0.0, v_fwd, push), search_turn_};
        const double bearing = to_degrees(std::atan2(zr, zf));
        const double target = std::abs(bearing) <= max_turn ? cruise : 0.0;
        return {drive(target, v_fwd, push), steer(bearing)};
    }
    if (wall_dist < 1e8) {
        const double inward = turned(to_degrees(std::atan2(wall_r, wall_f)));
        const double target = std::abs(inward) <= max_turn ? cruise : 0.0;
        return {drive(target, v_fwd, push), steer(inward)};
    }
    return {drive(0.0, v_fwd, push), search_turn_};
}

}  // namespace ringside::runtime
