#include <algorithm>
#include <numeric>
#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ringside/arena/match.hpp"
#include "ringside/common/errors.hpp"
#include "ringside/critic/trajectory.hpp"
#include "ringside/runtime/builtin.hpp"

using namespace ringside;
using namespace ringside::critic;

namespace {

class ConstantPolicy final : public runtime::Policy {
public:
    explicit ConstantPolicy(arena::Action a) : a_(a) {}
    void start(arena::Team, const arena::EnvConfig&, std::uint64_t) override {}
    arena::Action act(const arena::Observation&) override { return a_; }

private:
    arena::Action a_;
};

std::vector<arena::Transcript> random_episodes(const std::string& me, int n) {
    std::vector<arena::Transcript> out;
    for (int i = 0; i < n; ++i) {
        runtime::RandomPolicy a(i), b(100 + i);
        arena::MatchOptions mo;
        mo.policy_ids = i % 2 == 0 ? std::array<std::string, 2>{me, "opp"} : std::array<std::string, 2>{"opp", me};
        out.push_back(*arena::run_match(a, b, arena::EnvConfig{}, 50 + i, mo).transcript);
    }
    return out;
}

}  // namespace

TEST(Trajectory, Round2) {
    EXPECT_EQ(round2(1.005), std::round(1.005 * 100) / 100);
    EXPECT_EQ(round2(-0.001), 0.0);
    EXPECT_FALSE(std::signbit(round2(-0.001)));
    EXPECT_EQ(round2(3.14159), 3.14);
}

TEST(Trajectory, RunningWinFraction) {
    EXPECT_EQ(running_win_fraction({-1, 1, 1}), (std::vector<double>{0.0, 0.5, 0.67}));
    EXPECT_EQ(running_win_fraction({0, 1}), (std::vector<double>{0.5, 0.75}));
}

TEST(Trajectory, ConstantActionsCollapse) {
    std::vector<arena::Transcript> ts;
    for (int i = 0; i < 3; ++i) {
        ConstantPolicy a({80.0, 20.0}), b({0.0, 0.0});
        arena::MatchOptions mo;
        mo.policy_ids = {"cand", "opp"};
        ts.push_back(*arena::run_match(a, b, arena::EnvConfig{}, i, mo).transcript);
    }
    const auto t = compress_trajectory(ts, "cand");
    ASSERT_EQ(t.af.size(), 3u);
    for (std::size_t e = 0; e < 3; ++e) {
        EXPECT_LE(t.af[e].size(), 2u);  // one run, plus the terminal step
        EXPECT_EQ(t.af[e].front().value, 80.0);
        EXPECT_EQ(t.aa[e].front().value, 20.0);
        EXPECT_EQ(static_cast<std::size_t>(std::accumulate(t.af[e].begin(), t.af[e].end(), 0,
                                                            [](int s, const critic::Run& r) { return s + r.count; })),
                  ts[e].steps.size());
    }
}

TEST(Trajectory, ExactKeysAndRoundTrip) {
    const auto t = compress_trajectory(random_episodes("cand", 3), "cand");
    const std::string text = trajectory_to_json(t);
    const auto j = nlohmann::json::parse(text);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::vector<std::string> want(std::begin(kTrajectoryKeys), std::end(kTrajectoryKeys));
    std::sort(want.begin(), want.end());
    EXPECT_EQ(keys, want);
    EXPECT_EQ(trajectory_from_json(text), t);
    EXPECT_EQ(text.substr(0, 6), "{\"an\":");
}

TEST(Trajectory, ExtraOrMissingKeysAreRejected) {
    EXPECT_THROW(trajectory_from_json(R"({"an":"x"})"), ContractViolation);
    const auto t = compress_trajectory(random_episodes("cand", 1), "cand");
    auto j = nlohmann::json::parse(trajectory_to_json(t));
    j["extra"] = 1;
    EXPECT_THROW(trajectory_from_json(j.dump()), ContractViolation);
}

TEST(Trajectory, ExpansionReproducesRoundedSteps) {
    const auto ts = random_episodes("cand", 4);
    const auto t = compress_trajectory(ts, "cand");
    for (std::size_t e = 0; e < ts.size(); ++e) {
        const int me = ts[e].policy_ids[0] == "cand" ? 0 : 1;
        const auto af = expand(t.af[e]);
        const auto oa = expand(t.oa[e]);
        ASSERT_EQ(af.size(), ts[e].steps.size());
        for (std::size_t i = 0; i < af.size(); ++i) {
            EXPECT_EQ(af[i], round2(ts[e].steps[i].actions[me].force));
            EXPECT_EQ(oa[i], round2(ts[e].steps[i].actions[1 - me].angle_delta));
        }
    }
}

TEST(Trajectory, D2bIsTheRunMinimumOfTheGeometry) {
    const auto ts = random_episodes("cand", 3);
    const auto t = compress_trajectory(ts, "cand");
    for (std::size_t e = 0; e < ts.size(); ++e) {
        const int me = ts[e].policy_ids[0] == "cand" ? 0 : 1;
        const auto& cfg = ts[e].config;
        std::size_t step = 0;
        for (const critic::Run& r : t.d2b[e]) {
            double lo = 1e9;
            for (int i = 0; i < r.count; ++i, ++step) {
                const auto& p = ts[e].steps[step].positions[me];
                lo = std::min(lo, round2(cfg.arena_radius - std::hypot(p.x, p.y) - cfg.agent_radius));
            }
            EXPECT_NEAR(r.value, lo, 0.01);
        }
    }
}

TEST(Trajectory, TerminalRewardHasItsOwnRun) {
    ConstantPolicy pusher({200.0, 0.0}), still({0.0, 0.0});
    arena::MatchOptions mo;
    mo.policy_ids = {"cand", "opp"};
    const auto tr = *arena::run_match(pusher, still, arena::EnvConfig{}, 21, mo).transcript;
    const auto t = compress_trajectory({tr}, "cand");
    ASSERT_EQ(tr.outcome, arena::Outcome::team_0_win);
    EXPECT_EQ(t.rw[0].back().value, 100.0);
    EXPECT_EQ(t.rw[0].back().count, 1);
    for (std::size_t i = 0; i + 1 < t.rw[0].size(); ++i) EXPECT_EQ(t.rw[0][i].value, 0.0);
    EXPECT_EQ(t.fr, (std::vector<double>{1.0}));
    EXPECT_EQ(t.rs, (std::vector<double>{1.0}));
}

TEST(Trajectory, EmptyInputAndForeignTranscripts) {
    EXPECT_THROW(compress_trajectory({}, "x"), ContractViolation);
    EXPECT_THROW(compress_trajectory(random_episodes("cand", 1), "someone"), ContractViolation);
}
