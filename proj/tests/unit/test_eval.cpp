#include <algorithm>
#include <set>

#include <doctest.h>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "soccersum/core/errors.hpp"
#include "soccersum/eval/baselines.hpp"
#include "soccersum/eval/kfold.hpp"
#include "soccersum/eval/metrics.hpp"

using namespace soccersum;
using namespace soccersum::eval;
using fixture::action;
using T = SummaryActionType;

TEST_SUITE("eval") {

TEST_CASE("f-beta and counts") {
    CHECK(fbeta(0.5, 1.0, 2.0) == doctest::Approx(0.833333333333));
    CHECK(fbeta(0.75, 0.6, 1.0) == doctest::Approx(0.666666666667));
    CHECK(fbeta(0.0, 0.0, 2.0) == 0.0);
    Counts c{3, 1, 2};
    CHECK(c.precision() == 0.75);
    CHECK(c.recall() == 0.6);
    CHECK(c.missing_rate() == doctest::Approx(40.0));
    c += Counts{1, 0, 0};
    CHECK(c.tp == 4);
    CHECK(Counts{}.precision() == 0.0);
    CHECK(Counts{}.missing_rate() == 100.0);
}

TEST_CASE("overlap matching needs half the proposal inside one reference") {
    const std::vector<Action> ref = {action(2, 6)};
    CHECK(overlap_match(std::vector<Action>{action(0, 3)}, ref).counts.tp == 1);
    CHECK(overlap_match(std::vector<Action>{action(0, 2)}, ref).counts.tp == 0);
    CHECK(overlap_match(std::vector<Action>{action(3, 4)}, ref).counts.tp == 1);

    const std::vector<Action> two = {action(0, 4), action(5, 9)};
    const auto r = overlap_match(std::vector<Action>{action(0, 9), action(5, 9), action(6, 7)}, two);
    CHECK(r.predicted_tp == std::vector<bool>{true, true, false});
    CHECK(r.gt_hit == std::vector<bool>{true, true});
    CHECK(r.counts.fp == 1);
    CHECK(r.counts.fn == 0);
}

TEST_CASE("summary matching uses type and neighbourhood windows") {
    const Match m = fixture::match(std::vector<std::string>(20, "pass"), 3.0);
    const std::vector<Action> ref = {action(2, 3, T::goal), action(10, 11, T::shot)};
    const std::vector<Action> pred = {action(5, 6, T::shot), action(12, 13, T::goal)};
    const auto r = match_summary_actions(pred, ref, m);
    CHECK(r.gt_hit == std::vector<bool>{false, true});
    CHECK(r.predicted_tp == std::vector<bool>{true, false});
    CHECK(r.counts.tp == 1);
    CHECK(r.counts.fp == 1);
    CHECK(r.counts.fn == 1);

    // Window bounds are inclusive.
    const std::vector<Action> edge = {action(11, 12, T::goal)};
    CHECK(match_summary_actions(edge, ref, m).counts.tp == 0);
    const std::vector<Action> at = {action(10, 12, T::goal)};
    CHECK(match_summary_actions(at, ref, m).counts.tp == 1);
}

TEST_CASE("summary matching agrees with exhaustive assignment search") {
    Rng rng(71);
    for (int trial = 0; trial < 300; ++trial) {
        const Match m = fixture::random_timeline(rng, 48);
        const auto ref = fixture::random_actions(rng, 48, rng.below(7), 3);
        const auto pred = fixture::random_actions(rng, 48, rng.below(7), 3);
        const auto r = match_summary_actions(pred, ref, m);
        CHECK(r.counts.tp == oracle::best_summary_matching(pred, ref, m));
        CHECK(r.counts.fp + r.counts.tp == pred.size());
        CHECK(r.counts.fn + r.counts.tp == ref.size());
    }
}

TEST_CASE("k-fold roles partition the matches") {
    const auto folds = kfold_split(60, 10, 7);
    REQUIRE(folds.size() == 10);
    std::multiset<std::size_t> tested;
    for (std::size_t i = 0; i < 10; ++i) {
        const Fold& f = folds[i];
        CHECK(f.test.size() == 6);
        CHECK(f.validation.size() == 6);
        CHECK(f.train.size() == 48);
        CHECK(std::is_sorted(f.train.begin(), f.train.end()));
        std::set<std::size_t> all(f.train.begin(), f.train.end());
        all.insert(f.validation.begin(), f.validation.end());
        all.insert(f.test.begin(), f.test.end());
        CHECK(all.size() == 60);
        CHECK(f.validation == folds[(i + 1) % 10].test);
        tested.insert(f.test.begin(), f.test.end());
    }
    CHECK(tested.size() == 60);
    CHECK(std::set<std::size_t>(tested.begin(), tested.end()).size() == 60);
    CHECK(kfold_split(60, 10, 7)[3].test == folds[3].test);
    CHECK(kfold_split(60, 10, 8)[0].test != folds[0].test);
    CHECK(kfold_split(7, 3, 1)[0].test.size() == 2);
    CHECK_THROWS_AS(kfold_split(5, 6, 1), DataError);
    CHECK_THROWS_AS(kfold_split(10, 2, 1), DataError);
}

TEST_CASE("soccer baselines") {
    std::vector<Action> props;
    for (std::size_t i = 0; i < 10000; ++i) props.push_back(action(i, i, static_cast<T>(i % 10)));
    const auto rnd = soccer_baseline(SoccerBaseline::random, props, 3);
    CHECK(rnd.size() > 4800);
    CHECK(rnd.size() < 5200);
    CHECK(soccer_baseline(SoccerBaseline::random, props, 3) == rnd);
    const auto goals = soccer_baseline(SoccerBaseline::goals, props, 0);
    CHECK(goals.size() == 1000);
    CHECK(std::all_of(goals.begin(), goals.end(), [](const Action& a) { return a.type == T::goal; }));
    CHECK(soccer_baseline(SoccerBaseline::shots_on_target, props, 0).size() == 3000);
    CHECK(to_string(SoccerBaseline::goals) == "Only Goals");
}

}  // TEST_SUITE
