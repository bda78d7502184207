#include "ringside/arena/match.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"

namespace ringside::arena {

using nlohmann::json;

namespace {

json pair_of(const std::array<Vec2, 2>& v) {
    return json::array({json::array({v[0].x, v[0].y}), json::array({v[1].x, v[1].y})});
}

std::array<Vec2, 2> vec_pair(const json& j) {
    return {Vec2{j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>()},
            Vec2{j.at(1).at(0).get<double>(), j.at(1).at(1).get<double>()}};
}

Outcome forfeit_outcome(Team faulting) {
    return faulting == Team::team_0 ? Outcome::team_1_win : Outcome::team_0_win;
}

}  // namespace

int MatchRecord::score(Team side) const {
    switch (outcome) {
        case Outcome::team_0_win: return side == Team::team_0 ? 1 : -1;
        case Outcome::team_1_win: return side == Team::team_1 ? 1 : -1;
        default: return 0;
    }
}

bool MatchRecord::involves(const std::string& policy_id) const {
    return policy_ids[0] == policy_id || policy_ids[1] == policy_id;
}

Team MatchRecord::side_of(const std::string& policy_id) const {
    if (policy_ids[0] == policy_id) return Team::team_0;
    if (policy_ids[1] == policy_id) return Team::team_1;
    throw ContractViolation("match " + match_id + " does not involve policy " + policy_id);
}

void write_transcript(std::ostream& out, const Transcript& t) {
    json header{{"type", "header"},
                {"match_id", t.match_id},
                {"seed", t.seed},
                {"team_0", t.policy_ids[0]},
                {"team_1", t.policy_ids[1]},
                {"config", t.config},
                {"initial_positions", pair_of(t.initial_positions)}};
    out << header.dump() << '\n';
    for (const StepRecord& s : t.steps) {
        json rec{{"type", "step"},
                 {"step", s.step},
                 {"actions", json::array({json::array({s.actions[0].force, s.actions[0].angle_delta}),
                                          json::array({s.actions[1].force, s.actions[1].angle_delta})})},
                 {"positions", pair_of(s.positions)},
                 {"velocities", pair_of(s.velocities)},
                 {"energies", json::array({s.energies[0], s.energies[1]})},
                 {"rewards", json::array({s.rewards[0], s.rewards[1]})},
                 {"outcome", to_string(s.outcome)}};
        out << rec.dump() << '\n';
    }
    json result{{"type", "result"}, {"outcome", to_string(t.outcome)}, {"steps", t.steps.size()}};
    if (t.fault) {
        result["fault"] = json{{"side", to_string(t.fault->side)},
                               {"step", t.fault->step},
                               {"reason", t.fault->reason},
                               {"detail", t.fault->detail}};
    }
    out << result.dump() << '\n';
}

std::string transcript_to_string(const Transcript& t) {
    std::ostringstream os;
    write_transcript(os, t);
    return os.str();
}

Transcript read_transcript(std::istream& in) {
    Transcript t;
    std::string line;
    bool saw_header = false;
    bool saw_result = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw StorageError("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string type = j.value("type", "");
        if (type == "header") {
            t.match_id = j.at("match_id").get<std::string>();
            t.seed = j.at("seed").get<std::uint64_t>();
            t.policy_ids = {j.at("team_0").get<std::string>(), j.at("team_1").get<std::string>()};
            t.config = j.at("config").get<EnvConfig>();
            t.initial_positions = vec_pair(j.at("initial_positions"));
            saw_header = true;
        } else if (type == "step") {
            StepRecord s;
            s.step = j.at("step").get<int>();
            const json& a = j.at("actions");
            s.actions = {Action{a.at(0).at(0).get<double>(), a.at(0).at(1).get<double>()},
                         Action{a.at(1).at(0).get<double>(), a.at(1).at(1).get<double>()}};
            s.positions = vec_pair(j.at("positions"));
            s.velocities = vec_pair(j.at("velocities"));
            s.energies = {j.at("energies").at(0).get<double>(), j.at("energies").at(1).get<double>()};
            s.rewards = {j.at("rewards").at(0).get<double>(), j.at("rewards").at(1).get<double>()};
            s.outcome = outcome_from_string(j.at("outcome").get<std::string>());
            t.steps.push_back(s);
        } else if (type == "result") {
            t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
            if (j.contains("fault")) {
                const json& f = j.at("fault");
                t.fault = FaultInfo{team_from_string(f.at("side").get<std::string>()),
                                    f.at("step").get<int>(), f.at("reason").get<std::string>(),
                                    f.at("detail").get<std::string>()};
            }
            saw_result = true;
        } else {
            throw StorageError("transcript line " + std::to_string(line_no) + ": unknown record type");
        }
    }
    if (!saw_header || !saw_result) throw StorageError("transcript is missing its header or result record");
    return t;
}

MatchRecord run_match(runtime::Policy& team0, runtime::Policy& team1, const EnvConfig& config,
                      std::uint64_t seed, const MatchOptions& options) {
    Arena arena(config);
    std::array<runtime::Policy*, 2> policies{&team0, &team1};

    MatchRecord record;
    record.match_id = options.match_id;
    record.seed = seed;
    record.policy_ids = options.policy_ids;

    Transcript transcript;
    transcript.match_id = options.match_id;
    transcript.seed = seed;
    transcript.policy_ids = options.policy_ids;
    transcript.config = config;

    auto observations = arena.reset(seed);
    transcript.initial_positions = {arena.state().agents[0].position, arena.state().agents[1].position};

    // Runs `fn` for one side and converts any exception into a forfeit.
    auto guarded = [&](int side, auto&& fn) -> bool {
        try {
            fn();
            return true;
        } catch (const PolicyFault& f) {
            record.fault = FaultInfo{static_cast<Team>(side), arena.state().step, f.reason(), f.detail()};
        } catch (const std::exception& e) {
            record.fault = FaultInfo{static_cast<Team>(side), arena.state().step, "policy exception", e.what()};
        }
        return false;
    };

    bool faulted = false;
    for (int side = 0; side < 2 && !faulted; ++side) {
        faulted = !guarded(side, [&] { policies[side]->start(static_cast<Team>(side), config, seed); });
    }

    while (!faulted) {
        std::array<Action, 2> actions{};
        for (int side = 0; side < 2 && !faulted; ++side) {
            faulted = !guarded(side, [&] {
                actions[side] = clamp_action(policies[side]->act(observations[side]), config);
            });
        }
        if (faulted) break;

        StepResult result = arena.step(actions);
        if (options.record_transcript) {
            const EnvState& s = arena.state();
            StepRecord rec;
            rec.step = s.step;
            rec.actions = arena.clamped_actions();
            rec.positions = {s.agents[0].position, s.agents[1].position};
            rec.velocities = {s.agents[0].velocity, s.agents[1].velocity};
            rec.energies = {s.agents[0].energy, s.agents[1].energy};
            rec.rewards = result.rewards;
            rec.outcome = result.outcome;
            transcript.steps.push_back(rec);
        }
        if (result.done) {
            record.outcome = result.outcome;
            break;
        }
        observations = std::move(result.observations);
    }

    if (faulted) record.outcome = forfeit_outcome(record.fault->side);
    record.steps = arena.state().step;

    for (auto* p : policies) {
        try {
            p->finish();
        } catch (...) {
            // the outcome is already decided
        }
    }

    if (options.record_transcript) {
        transcript.outcome = record.outcome;
        transcript.fault = record.fault;
        record.transcript = std::move(transcript);
    }
    return record;
}

}  // namespace ringside::arena
