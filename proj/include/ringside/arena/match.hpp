#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ringside/arena/config.hpp"
#include "ringside/arena/types.hpp"
#include "ringside/runtime/policy.hpp"

namespace ringside::arena {

struct StepRecord {
    int step = 0;
    std::array<Action, 2> actions{};  // post-clamp
    std::array<Vec2, 2> positions{};
    std::array<Vec2, 2> velocities{};
    std::array<double, 2> energies{};
    std::array<double, 2> rewards{};
    Outcome outcome = Outcome::ongoing;
};

struct FaultInfo {
    Team side = Team::team_0;
    int step = 0;
    std::string reason;
    std::string detail;
};

// Replay transcript: header fields plus one record per step.
struct Transcript {
    std::string match_id;
    std::uint64_t seed = 0;
    std::array<std::string, 2> policy_ids;
    EnvConfig config;
    std::array<Vec2, 2> initial_positions{};
    std::vector<StepRecord> steps;
    Outcome outcome = Outcome::ongoing;
    std::optional<FaultInfo> fault;
};

// JSON lines: a header record, one record per step, and a closing result record.
void write_transcript(std::ostream& out, const Transcript& t);
std::string transcript_to_string(const Transcript& t);
Transcript read_transcript(std::istream& in);

struct MatchRecord {
    std::string match_id;
    std::uint64_t seed = 0;
    std::array<std::string, 2> policy_ids;  // [team_0, team_1]
    Outcome outcome = Outcome::ongoing;
    int steps = 0;
    std::optional<FaultInfo> fault;
    std::optional<Transcript> transcript;

    // s in {-1, 0, 1} for the given side.
    int score(Team side) const;
    // Returns the side `policy_id` played; throws ContractViolation if absent.
    Team side_of(const std::string& policy_id) const;
    bool involves(const std::string& policy_id) const;
};

struct MatchOptions {
    std::string match_id;
    std::array<std::string, 2> policy_ids{"team_0", "team_1"};
    bool record_transcript = true;
};

// Plays one episode: `team0` controls team_0, `team1` controls team_1.
// Policy faults forfeit the faulting side; they are never rethrown.
MatchRecord run_match(runtime::Policy& team0, runtime::Policy& team1, const EnvConfig& config,
                      std::uint64_t seed, const MatchOptions& options = {});

}  // namespace ringside::arena
