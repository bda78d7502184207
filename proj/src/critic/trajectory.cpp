#include "ringside/critic/trajectory.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"

namespace ringside::critic {

using nlohmann::ordered_json;

double round2(double x) {
    const double r = std::round(x * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;  // no negative zero in the output
}

namespace {

struct StepView {
    double af, aa, of, oa, d2b, rw;
};

bool same_actions(const StepView& a, const StepView& b) {
    return a.af == b.af && a.aa == b.aa && a.of == b.of && a.oa == b.oa;
}

ordered_json encode_runs(const RunSeq& runs) {
    ordered_json arr = ordered_json::array();
    for (const Run& r : runs) {
        if (r.count > 1) {
            arr.push_back(ordered_json::array({r.value, r.count}));
        } else {
            arr.push_back(r.value);
        }
    }
    return arr;
}

RunSeq decode_runs(const ordered_json& arr) {
    RunSeq runs;
    for (const auto& e : arr) {
        if (e.is_number()) {
            runs.push_back({e.get<double>(), 1});
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number_integer() &&
                   e[1].get<int>() >= 1) {
            runs.push_back({e[0].get<double>(), e[1].get<int>()});
        } else {
            throw ContractViolation("trajectory: malformed run element " + e.dump());
        }
    }
    return runs;
}

}  // namespace

std::vector<double> running_win_fraction(const std::vector<int>& scores) {
    std::vector<double> out;
    double points = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        points += scores[i] > 0 ? 1.0 : scores[i] == 0 ? 0.5 : 0.0;
        out.push_back(round2(points / static_cast<double>(i + 1)));
    }
    return out;
}

CompressedTrajectory compress_trajectory(const std::vector<arena::Transcript>& transcripts,
                                         const std::string& agent_name) {
    if (transcripts.empty()) throw ContractViolation("compress_trajectory needs at least one transcript");
    CompressedTrajectory out;
    out.an = agent_name;
    std::vector<int> scores;

    for (const auto& t : transcripts) {
        int me = -1;
        if (t.policy_ids[0] == agent_name) me = 0;
        else if (t.policy_ids[1] == agent_name) me = 1;
        if (me < 0) throw ContractViolation("transcript " + t.match_id + " does not involve " + agent_name);
        const int opp = 1 - me;

        arena::MatchRecord rec;
        rec.outcome = t.outcome;
        const int s = rec.score(me == 0 ? arena::Team::team_0 : arena::Team::team_1);
        scores.push_back(s);
        out.fr.push_back(s > 0 ? 1.0 : 0.0);

        RunSeq af, aa, of, oa, d2b, rw;
        const std::size_t n = t.steps.size();
        for (std::size_t i = 0; i < n; ++i) {
            const arena::StepRecord& st = t.steps[i];
            const double dist = t.config.arena_radius - st.positions[me].norm() - t.config.agent_radius;
            StepView v{round2(st.actions[me].force), round2(st.actions[me].angle_delta),
                       round2(st.actions[opp].force), round2(st.actions[opp].angle_delta),
                       round2(dist), round2(st.rewards[me])};
            const bool terminal = i + 1 == n && st.outcome != arena::Outcome::ongoing;
            const bool extend = !af.empty() && !terminal &&
                                same_actions({af.back().value, aa.back().value, of.back().value,
                                              oa.back().value, 0.0, 0.0},
                                             v);
            if (extend) {
                af.back().count++;
                aa.back().count++;
                of.back().count++;
                oa.back().count++;
                d2b.back().count++;
                rw.back().count++;
                d2b.back().value = std::min(d2b.back().value, v.d2b);
                rw.back().value = round2(rw.back().value + v.rw);
            } else {
                af.push_back({v.af, 1});
                aa.push_back({v.aa, 1});
                of.push_back({v.of, 1});
                oa.push_back({v.oa, 1});
                d2b.push_back({v.d2b, 1});
                rw.push_back({v.rw, 1});
            }
        }
        out.af.push_back(std::move(af));
        out.aa.push_back(std::move(aa));
        out.of.push_back(std::move(of));
        out.oa.push_back(std::move(oa));
        out.d2b.push_back(std::move(d2b));
        out.rw.push_back(std::move(rw));
    }
    out.rs = running_win_fraction(scores);
    return out;
}

std::vector<double> expand(const RunSeq& runs) {
    std::vector<double> out;
    for (const Run& r : runs) out.insert(out.end(), static_cast<std::size_t>(r.count), r.value);
    return out;
}

std::string trajectory_to_json(const CompressedTrajectory& t, int indent) {
    auto episodes = [](const std::vector<RunSeq>& eps) {
        ordered_json arr = ordered_json::array();
        for (const auto& e : eps) arr.push_back(encode_runs(e));
        return arr;
    };
    ordered_json j;
    j["an"] = t.an;
    j["rs"] = t.rs;
    j["fr"] = t.fr;
    j["af"] = episodes(t.af);
    j["aa"] = episodes(t.aa);
    j["of"] = episodes(t.of);
    j["oa"] = episodes(t.oa);
    j["d2b"] = episodes(t.d2b);
    j["rw"] = episodes(t.rw);
    return j.dump(indent);
}

CompressedTrajectory trajectory_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ContractViolation(std::string("trajectory: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ContractViolation("trajectory: expected an object");
    std::set<std::string> expected(std::begin(kTrajectoryKeys), std::end(kTrajectoryKeys));
    std::set<std::string> actual;
    for (const auto& [k, _] : j.items()) actual.insert(k);
    if (actual != expected) throw ContractViolation("trajectory: key set differs from the schema");

    auto episodes = [&](const char* key) {
        std::vector<RunSeq> out;
        for (const auto& e : j.at(key)) out.push_back(decode_runs(e));
        return out;
    };
    CompressedTrajectory t;
    t.an = j.at("an").get<std::string>();
    t.rs = j.at("rs").get<std::vector<double>>();
    t.fr = j.at("fr").get<std::vector<double>>();
    t.af = episodes("af");
    t.aa = episodes("aa");
    t.of = episodes("of");
    t.oa = episodes("oa");
    t.d2b = episodes("d2b");
    t.rw = episodes("rw");
    const std::size_t n = t.af.size();
    if (t.rs.size() != n || t.fr.size() != n || t.aa.size() != n || t.of.size() != n || t.oa.size() != n ||
        t.d2b.size() != n || t.rw.size() != n) {
        throw ContractViolation("trajectory: per-episode array counts differ");
    }
    return t;
}

}  // namespace ringside::critic
