#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ringside/common/errors.hpp"
#include "ringside/critic/collect.hpp"
#include "ringside/critic/memory.hpp"
#include "ringside/critic/reflect.hpp"
#include "ringside/planner/mock.hpp"
#include "ringside/runtime/builtin.hpp"

using namespace ringside;
using namespace ringside::critic;

namespace {

const char* kReport =
    "#Reflection: The agent rushes forward and falls off the edge.\n"
    "- ignores the boundary\n"
    "#Code error:\n"
    "1. act, line 4: force is never reduced near the edge\n"
    "2. the angle is constant\n"
    "#Improvement Recommendations:\n"
    "1. Back off when d2b < 40.\n"
    "   e.g. if d2b < 40: force = -50\n"
    "2. Steer toward the opponent.\n";

class CountingLlm final : public planner::LlmGateway {
public:
    explicit CountingLlm(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string chat(const planner::ChatRequest& r) override {
        requests.push_back(r);
        return replies_[std::min(requests.size() - 1, replies_.size() - 1)];
    }
    std::vector<planner::ChatRequest> requests;

private:
    std::vector<std::string> replies_;
};

CompressedTrajectory tiny_trajectory() {
    CompressedTrajectory t;
    t.an = "cand";
    t.rs = {0.0};
    t.fr = {0.0};
    t.af = t.aa = t.of = t.oa = t.d2b = t.rw = {{{0.0, 3}}};
    return t;
}

ReflectionReport report_with(const std::string& flaw) {
    ReflectionReport r;
    r.summary = "Loses at the edge.";
    r.code_errors = {{"act", flaw}};
    r.improvements = {"Back off near the edge."};
    return r;
}

}  // namespace

TEST(Reflection, ParsesThreeSections) {
    const auto r = parse_reflection(kReport);
    EXPECT_EQ(r.summary, "The agent rushes forward and falls off the edge.");
    EXPECT_EQ(r.flaws, (std::vector<std::string>{"ignores the boundary"}));
    ASSERT_EQ(r.code_errors.size(), 2u);
    EXPECT_EQ(r.code_errors[0].location, "act, line 4");
    EXPECT_EQ(r.code_errors[0].description, "force is never reduced near the edge");
    EXPECT_EQ(r.code_errors[1].location, "");
    ASSERT_EQ(r.improvements.size(), 2u);
    EXPECT_NE(r.improvements[0].find("force = -50"), std::string::npos);
    EXPECT_EQ(r.raw, kReport);
}

TEST(Reflection, MissingSectionIsAnError) {
    EXPECT_THROW(parse_reflection("#Reflection: x\n#Code error:\n1. a: b\n"), ReflectionError);
    EXPECT_THROW(parse_reflection("#Reflection:\n#Code error:\n#Improvement Recommendations:\n1. x\n"),
                 ReflectionError);
    EXPECT_THROW(parse_reflection("#Reflection: x\n#Code error:\n#Improvement Recommendations:\n"), ReflectionError);
}

TEST(Reflection, RetriesOnceWithFormatReminder) {
    CountingLlm llm({"no structure here", kReport});
    const auto r = reflect("policy = heuristic\n", tiny_trajectory(), llm);
    EXPECT_EQ(r.improvements.size(), 2u);
    ASSERT_EQ(llm.requests.size(), 2u);
    EXPECT_EQ(llm.requests[0].kind, planner::PromptKind::reflect);
    EXPECT_GT(llm.requests[1].user.size(), llm.requests[0].user.size());
    EXPECT_NE(llm.requests[0].user.find("\"an\":\"cand\""), std::string::npos);

    CountingLlm broken({"still nothing"});
    EXPECT_THROW(reflect("x", tiny_trajectory(), broken), ReflectionError);
    EXPECT_EQ(broken.requests.size(), 2u);
}

TEST(Reflection, MockCannedReportParses) {
    planner::MockLlm mock;
    EXPECT_NO_THROW(reflect("policy = heuristic\n", tiny_trajectory(), mock));
}

TEST(Memory, UnderBudgetAppendsWithoutLlm) {
    CountingLlm llm({"unused"});
    ReflectionMemory m;
    m = append_and_compact(m, report_with("a"), "20260101_000000", llm);
    EXPECT_TRUE(llm.requests.empty());
    EXPECT_NE(m.digest.find("- Error in act: a"), std::string::npos);
    EXPECT_EQ(m.entries.size(), 1u);
}

TEST(Memory, DuplicatedCorpusShrinksAndMergesLines) {
    planner::MockLlm mock;
    ReflectionMemory m;
    m.char_budget = 1000;
    std::string before;
    for (int i = 0; i < 50; ++i) {
        before += report_digest(report_with("force ignores the edge"), "20260101_0000" + std::to_string(10 + i));
    }
    m.digest = before;
    const std::string after = compact_digest(m.digest, mock);
    EXPECT_LE(after.size(), before.size() * 7 / 10);
    EXPECT_FALSE(contains_timestamp(after));
    std::istringstream in(after);
    std::set<std::string> lines;
    std::string line;
    while (std::getline(in, line)) EXPECT_TRUE(lines.insert(line).second) << line;
}

TEST(Memory, GrowingCompactionIsRejected) {
    CountingLlm llm({std::string(5000, 'x')});
    const std::string digest = "- Fix: one\n";
    EXPECT_EQ(compact_digest(digest, llm), digest);
}

TEST(Memory, StaysWithinBudget) {
    CountingLlm llm({"- Fix: keep this\n"});
    ReflectionMemory m;
    m.char_budget = 200;
    for (int i = 0; i < 10; ++i) m = append_and_compact(m, report_with("item " + std::to_string(i)), "id", llm);
    EXPECT_LE(m.digest.size(), 200u);
    EXPECT_FALSE(llm.requests.empty());
    EXPECT_EQ(llm.requests.front().kind, planner::PromptKind::compact);
}

TEST(Collect, SplitEpisodes) {
    EXPECT_EQ(split_episodes(10, 3), (std::vector<int>{4, 3, 3}));
    EXPECT_EQ(split_episodes(10, 1), (std::vector<int>{10}));
    EXPECT_THROW(split_episodes(10, 0), ContractViolation);
}

TEST(Collect, AgainstRandomPool) {
    rating::EloTable table;
    table.ensure("rnd");
    const auto rnd = runtime::spec_for_source("policy = random\nseed = 0\n", "", {});
    const auto cand = runtime::spec_for_source(runtime::format_heuristic_source({}), "", {});
    CollectOptions o;
    o.k = 1;
    o.L = 10;
    o.threads = 2;
    Rng rng(3);
    const auto r = collect_trajectories("cand", cand, table, [&](const std::string&) { return rnd; }, o, rng);
    EXPECT_EQ(r.stats.L, 10);
    EXPECT_EQ(r.opponents, (std::vector<std::string>{"rnd"}));
    EXPECT_EQ(r.trajectory.an, "cand");
    EXPECT_EQ(r.trajectory.rs.size(), 10u);
    EXPECT_EQ(r.trajectory.af.size(), 10u);
    int first = 0;
    for (const auto& rec : r.records) first += rec.policy_ids[0] == "cand";
    EXPECT_EQ(first, 5);  // side-switched
    o.k = 2;
    EXPECT_THROW(collect_trajectories("cand", cand, table, [&](const std::string&) { return rnd; }, o, rng),
                 RequestError);
}

TEST(Collect, BrokenCandidateLosesWithoutThrowing) {
    rating::EloTable table;
    table.ensure("rnd");
    const auto rnd = runtime::spec_for_source("policy = random\nseed = 0\n", "", {});
    const auto bad = runtime::spec_for_source("policy = heuristic\nnonsense = 1\n", "", {});
    CollectOptions o;
    o.k = 1;
    o.L = 4;
    Rng rng(1);
    const auto r = collect_trajectories("bad", bad, table, [&](const std::string&) { return rnd; }, o, rng);
    EXPECT_EQ(r.stats.losses, 4);
    for (const auto& rec : r.records) EXPECT_TRUE(rec.fault);
}
