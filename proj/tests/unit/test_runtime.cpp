#include <csignal>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"
#include "ringside/rating/stats.hpp"
#include "ringside/runtime/builtin.hpp"
#include "ringside/runtime/external.hpp"
#include "ringside/runtime/play.hpp"
#include "ringside/runtime/spec.hpp"
#include "ringside/runtime/validate.hpp"

using namespace ringside;
using namespace ringside::runtime;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

PolicySpec fake(const std::string& mode, std::chrono::milliseconds act = 1000ms,
                std::chrono::milliseconds init = 2000ms) {
    PolicySpec s;
    s.backend = Backend::external;
    s.external.argv = {FAKE_POLICY_PATH, "--mode", mode};
    s.act_timeout = act;
    s.init_timeout = init;
    return s;
}

PolicySpec builtin(const std::string& source) {
    return spec_for_source(source, "unused", RuntimeSettings{});
}

arena::Observation first_obs() {
    arena::Arena a(arena::EnvConfig{});
    return a.reset(1)[0];
}

// A zombie counts as dead: it was killed, only its reaper is slow.
bool alive(pid_t pid) {
    if (::kill(pid, 0) != 0) return false;
    std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
    std::string line;
    if (!std::getline(stat, line)) return false;
    const auto paren = line.rfind(')');
    return paren == std::string::npos || paren + 2 >= line.size() || line[paren + 2] != 'Z';
}

}  // namespace

TEST(Heuristic, ParseAndFormatRoundTrip) {
    HeuristicParams p;
    p.aggression = 0.35;
    p.turn_rate = 12;
    EXPECT_EQ(parse_heuristic_source(format_heuristic_source(p)), p);
}

TEST(Heuristic, SourceErrorsLookLikeTracebacks) {
    try {
        parse_heuristic_source("policy = heuristic\nspeed = 3\n");
        FAIL();
    } catch (const PolicyFault& f) {
        EXPECT_NE(f.detail().find("NameError"), std::string::npos);
        EXPECT_NE(f.detail().find("line 2"), std::string::npos);
    }
    EXPECT_THROW(parse_heuristic_source("aggression = lots\n"), PolicyFault);
    EXPECT_THROW(parse_heuristic_source("aggression = 2\n"), PolicyFault);
    EXPECT_THROW(parse_heuristic_source("just words\n"), PolicyFault);
}

TEST(Spec, BuiltinDetection) {
    EXPECT_EQ(builtin_kind_of("policy = random\nseed = 3\n"), BuiltinKind::random);
    EXPECT_EQ(builtin_kind_of("# note\npolicy = heuristic\n"), BuiltinKind::heuristic);
    EXPECT_FALSE(builtin_kind_of("def act(obs):\n    return [0, 0]\n"));
    EXPECT_THROW(spec_for_source("def act(obs): pass\n", "p.py", RuntimeSettings{}), ConfigError);
    RuntimeSettings rs;
    rs.harness_command = {"python3", "harness.py"};
    const auto s = spec_for_source("def act(obs): pass\n", "p.py", rs);
    EXPECT_EQ(s.backend, Backend::external);
    EXPECT_EQ(s.external.argv, (std::vector<std::string>{"python3", "harness.py", "--policy", "p.py"}));
}

TEST(RandomPolicy, SeededAndInsideTheBox) {
    arena::EnvConfig c;
    RandomPolicy a(5), b(5);
    a.start(arena::Team::team_0, c, 9);
    b.start(arena::Team::team_0, c, 9);
    const auto obs = first_obs();
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.act(obs);
        EXPECT_EQ(x, b.act(obs));
        EXPECT_GE(x.force, c.force_min);
        EXPECT_LE(x.force, c.force_max);
        EXPECT_GE(x.angle_delta, c.angle_min);
        EXPECT_LE(x.angle_delta, c.angle_max);
    }
}

TEST(StrongHeuristic, BeatsRandomSideSwitched) {
    const auto strong = builtin(format_heuristic_source(HeuristicParams{}));
    const auto rnd = builtin("policy = random\nseed = 0\n");
    std::vector<arena::MatchRecord> recs;
    for (int m = 0; m < 10; ++m) {
        arena::MatchOptions mo;
        mo.record_transcript = false;
        mo.policy_ids = m % 2 == 0 ? std::array<std::string, 2>{"s", "r"} : std::array<std::string, 2>{"r", "s"};
        recs.push_back(m % 2 == 0 ? play_match(strong, rnd, arena::EnvConfig{}, 1000 + m, mo)
                                  : play_match(rnd, strong, arena::EnvConfig{}, 1000 + m, mo));
    }
    EXPECT_EQ(rating::compute_stats(recs, "s").win_fraction, 1.0);
}

TEST(Wire, FramesRoundTrip) {
    const auto obs = first_obs();
    const auto back = decode_obs_frame(encode_obs_frame(obs));
    EXPECT_EQ(back.agent_obs, obs.agent_obs);
    EXPECT_EQ(back.energy, obs.energy);
    EXPECT_EQ(back.id, obs.id);
    EXPECT_EQ(decode_act_frame(encode_act_frame({12.5, -3.0})), (arena::Action{12.5, -3.0}));
    const auto init = nlohmann::json::parse(encode_init_frame(arena::Team::team_1, arena::EnvConfig{}));
    EXPECT_EQ(init["type"], "init");
    EXPECT_EQ(init["side"], "team_1");
    EXPECT_EQ(init["config"]["max_steps"], 500);
}

TEST(Wire, BadRepliesAreFaults) {
    EXPECT_THROW(decode_act_frame("nope"), PolicyFault);
    EXPECT_THROW(decode_act_frame(R"({"type":"act","action":[1,2,3]})"), PolicyFault);
    EXPECT_THROW(decode_act_frame(R"({"type":"act","action":["a",2]})"), PolicyFault);
    EXPECT_THROW(decode_act_frame(R"({"type":"hello"})"), PolicyFault);
    try {
        decode_act_frame(encode_error_frame("Traceback\nZeroDivisionError: division by zero"));
        FAIL();
    } catch (const PolicyFault& f) {
        EXPECT_NE(f.detail().find("ZeroDivisionError"), std::string::npos);
    }
}

TEST(External, HealthyPolicyPlaysAMatch) {
    const auto ext = fake("healthy");
    const auto rnd = builtin("policy = random\nseed = 1\n");
    const auto rec = play_match(ext, rnd, arena::EnvConfig{}, 4);
    EXPECT_FALSE(rec.fault) << rec.fault->reason;
    EXPECT_GT(rec.steps, 0);
    EXPECT_EQ(rec.transcript->steps.front().actions[0], (arena::Action{50.0, 0.0}));
}

struct FaultCase {
    std::string mode;
    std::string reason_part;
    std::string detail_part;
};

void PrintTo(const FaultCase& c, std::ostream* os) { *os << c.mode; }

class ExternalFaults : public ::testing::TestWithParam<FaultCase> {};

TEST_P(ExternalFaults, ForfeitWithReason) {
    const auto& c = GetParam();
    const auto ext = fake(c.mode, 300ms, 300ms);
    const auto still = builtin("policy = heuristic\naggression = 0\n");
    const auto rec = play_match(still, ext, arena::EnvConfig{}, 4);
    ASSERT_TRUE(rec.fault);
    EXPECT_EQ(rec.fault->side, arena::Team::team_1);
    EXPECT_EQ(rec.outcome, arena::Outcome::team_0_win);
    EXPECT_NE(rec.fault->reason.find(c.reason_part), std::string::npos) << rec.fault->reason;
    EXPECT_NE(rec.fault->detail.find(c.detail_part), std::string::npos) << rec.fault->detail;
}

INSTANTIATE_TEST_SUITE_P(
    Modes, ExternalFaults,
    ::testing::Values(FaultCase{"exit", "exited", "giving up"}, FaultCase{"nonjson", "non-JSON", "hello"},
                      FaultCase{"slow", "timed out", ""}, FaultCase{"slowinit", "init timed out", ""},
                      FaultCase{"three", "malformed action", "3.0"},
                      FaultCase{"nameerror", "raised an error", "NameError"},
                      FaultCase{"divzero", "raised an error", "ZeroDivisionError"},
                      FaultCase{"initerror", "failed to initialise", "SyntaxError"}),
    [](const auto& info) { return info.param.mode; });

TEST(External, MissingBinaryFaultsInsteadOfThrowing) {
    PolicySpec s = fake("healthy");
    s.external.argv = {"/nonexistent/ringside-harness"};
    const auto rec = play_match(s, builtin("policy = random\nseed = 0\n"), arena::EnvConfig{}, 1);
    ASSERT_TRUE(rec.fault);
    EXPECT_EQ(rec.fault->side, arena::Team::team_0);
}

TEST(External, ProcessGroupIsCleanedUp) {
    const fs::path pidfile = fs::temp_directory_path() / ("ringside_grandchild_" + std::to_string(::getpid()));
    PolicySpec s = fake("grandchild");
    s.external.argv.push_back("--pidfile");
    s.external.argv.push_back(pidfile.string());
    pid_t child = -1;
    {
        ExternalPolicy p(s);
        p.start(arena::Team::team_0, arena::EnvConfig{}, 0);
        child = *p.pid();
        p.act(first_obs());
        p.finish();
    }
    std::ifstream in(pidfile);
    pid_t grandchild = -1;
    in >> grandchild;
    fs::remove(pidfile);
    ASSERT_GT(grandchild, 0);
    EXPECT_FALSE(alive(child));
    // the grandchild was re-parented, so give init a moment to reap it
    for (int i = 0; i < 50 && alive(grandchild); ++i) ::usleep(20000);
    EXPECT_FALSE(alive(grandchild));
}

TEST(External, NoZombiesAfterManyMatches) {
    const auto ext = fake("healthy");
    arena::EnvConfig c;
    c.max_steps = 5;
    for (int i = 0; i < 20; ++i) play_match(ext, ext, c, i);
    errno = 0;
    EXPECT_EQ(::waitpid(-1, nullptr, WNOHANG), -1);
    EXPECT_EQ(errno, ECHILD);
}

TEST(Validate, ReportsPassAndFailure) {
    arena::EnvConfig c;
    EXPECT_TRUE(validate_policy(fake("healthy"), c).passed);
    EXPECT_TRUE(validate_policy(builtin(format_heuristic_source({})), c).passed);
    const auto bad = validate_policy(fake("divzero"), c);
    EXPECT_FALSE(bad.passed);
    EXPECT_NE(bad.traceback.find("ZeroDivisionError"), std::string::npos);
    const auto parse = validate_policy(builtin("policy = heuristic\nwobble = 1\n"), c);
    EXPECT_FALSE(parse.passed);
    EXPECT_NE(parse.traceback.find("NameError"), std::string::npos);
}
