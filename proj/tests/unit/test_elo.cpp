#include <cmath>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "ringside/common/errors.hpp"
#include "ringside/rating/elo.hpp"
#include "ringside/rating/export.hpp"
#include "ringside/rating/stats.hpp"

using namespace ringside;
using namespace ringside::rating;

TEST(Elo, ExpectedScoreHandValues) {
    // 1 / (1 + 10^(400/400)) = 1/11
    EXPECT_NEAR(expected_score(1200, 1600), 1.0 / 11.0, 1e-12);
    EXPECT_NEAR(expected_score(1600, 1200), 10.0 / 11.0, 1e-12);
    EXPECT_DOUBLE_EQ(expected_score(1500, 1500), 0.5);
}

TEST(Elo, EqualRatingsWin) {
    auto [a, b] = update_elo(1200, 1200, 1.0, 32);
    EXPECT_EQ(a, 1216.0);
    EXPECT_EQ(b, 1184.0);
}

TEST(Elo, DrawBetweenEqualsIsNoop) {
    auto [a, b] = update_elo(1400, 1400, 0.5, 32);
    EXPECT_EQ(a, 1400.0);
    EXPECT_EQ(b, 1400.0);
}

TEST(Elo, RejectsScoresOutsideTheSet) {
    EXPECT_THROW(update_elo(1200, 1200, 0.3, 32), ContractViolation);
    EXPECT_THROW(update_elo(1200, 1200, -1.0, 32), ContractViolation);
}

TEST(Elo, ZeroSumProperty) {
    Rng rng(7);
    const double scores[] = {0.0, 0.5, 1.0};
    for (int i = 0; i < 5000; ++i) {
        const double ra = rng.uniform(600, 2400), rb = rng.uniform(600, 2400);
        const double s = scores[rng.below(3)];
        auto [a, b] = update_elo(ra, rb, s, rng.uniform(1, 64));
        EXPECT_NEAR(a + b, ra + rb, 1e-9);
    }
}

TEST(Elo, TableRecordAndLookup) {
    EloTable t;
    t.ensure("a");
    t.ensure("b");
    t.record("a", "b", 1.0);
    EXPECT_EQ(t.rating("a"), 1216.0);
    EXPECT_EQ(t.rating("b"), 1184.0);
    EXPECT_THROW(t.rating("zz"), LookupError);
}

TEST(Softmax, ProbabilitiesSumToOneAndFollowRatings) {
    const auto p = selection_probabilities({1000, 1200, 1400}, 100.0);
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
    EXPECT_LT(p[0], p[1]);
    EXPECT_LT(p[1], p[2]);
    // ratio between neighbours is e^(200/100)
    EXPECT_NEAR(p[2] / p[1], std::exp(2.0), 1e-9);
}

TEST(Softmax, HugeRatingsStayFinite) {
    const auto p = selection_probabilities({1e6, 1e6 + 100}, 1.0);
    EXPECT_TRUE(std::isfinite(p[0]));
    EXPECT_NEAR(p[1], 1.0, 1e-12);
}

TEST(Softmax, SampleWithoutReplacement) {
    EloTable t;
    for (const char* id : {"a", "b", "c", "d"}) t.ensure(id);
    Rng rng(1);
    auto picked = softmax_sample(t, 4, 100.0, rng);
    std::sort(picked.begin(), picked.end());
    EXPECT_EQ(picked, (std::vector<std::string>{"a", "b", "c", "d"}));
    EXPECT_THROW(softmax_sample(t, 5, 100.0, rng), RequestError);
    EXPECT_THROW(softmax_sample(t, 0, 100.0, rng), RequestError);
}

TEST(Softmax, FrequencyIsMonotoneInRating) {
    EloTable t;
    t.ratings = {{"low", 1000}, {"mid", 1100}, {"high", 1250}, {"top", 1300}};
    Rng rng(99);
    std::map<std::string, int> hits;
    for (int i = 0; i < 10000; ++i) hits[softmax_sample(t, 1, 100.0, rng).front()]++;
    EXPECT_LE(hits["low"], hits["mid"]);
    EXPECT_LE(hits["mid"], hits["high"]);
    EXPECT_LE(hits["high"], hits["top"]);
}

TEST(Softmax, SameSeedSameDraws) {
    EloTable t;
    t.ratings = {{"a", 1000}, {"b", 1100}, {"c", 1200}};
    Rng r1(5), r2(5);
    EXPECT_EQ(softmax_sample(t, 2, 100.0, r1), softmax_sample(t, 2, 100.0, r2));
}

TEST(Stats, FiveTwoThree) {
    const auto s = MatchStats::from_counts(5, 2, 3);
    EXPECT_EQ(s.L, 10);
    EXPECT_NEAR(s.score_avg, 0.2, 1e-12);
    EXPECT_NEAR(s.win_fraction, 0.6, 1e-12);
    EXPECT_THROW(MatchStats::from_counts(0, 0, 0), ContractViolation);
}

TEST(Stats, ComputeFromRecordsUsesTheRightSide) {
    std::vector<arena::MatchRecord> recs(3);
    recs[0].policy_ids = {"x", "y"};
    recs[0].outcome = arena::Outcome::team_0_win;
    recs[1].policy_ids = {"y", "x"};
    recs[1].outcome = arena::Outcome::team_0_win;
    recs[2].policy_ids = {"y", "x"};
    recs[2].outcome = arena::Outcome::draw;
    const auto s = compute_stats(recs, "x");
    EXPECT_EQ(s.wins, 1);
    EXPECT_EQ(s.losses, 1);
    EXPECT_EQ(s.draws, 1);
}

TEST(EloCsv, RoundTrip) {
    std::vector<EloRow> rows{{"20260101_000000", 1187.5, 10, 3, 2, 5, std::nullopt},
                             {"20260101_000001", 1250.25, 0, 0, 0, 0, 4}};
    std::ostringstream out;
    write_elo_csv(out, rows);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kEloCsvHeader);
    EXPECT_NE(text.find("20260101_000000,1187.5000,10,3,2,5,0.4000,\n"), std::string::npos);
    EXPECT_NE(text.find("20260101_000001,1250.2500,0,0,0,0,,4\n"), std::string::npos);
    std::istringstream in(text);
    const auto back = read_elo_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].promotion_iteration, 4);
    EXPECT_EQ(back[0].rating, 1187.5);
}
