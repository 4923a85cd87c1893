#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <doctest.h>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"
#include "soccersum/stage3/ranking.hpp"

using namespace soccersum;
using namespace soccersum::stage3;

namespace {

// Total-variation distance between sampled rankings and the exact law.
double tv_distance(const std::vector<double>& theta, const std::vector<double>& law_theta, double sigma, int samples,
                   std::uint64_t seed) {
    std::map<Ranking, int> counts;
    for (int s = 0; s < samples; ++s) ++counts[sample_ranking(theta, sigma, derive_seed(seed, {std::uint64_t(s)}))];
    Ranking r(theta.size());
    std::iota(r.begin(), r.end(), 0);
    double tv = 0.0;
    do {
        const auto it = counts.find(r);
        const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / samples;
        tv += std::abs(emp - oracle::plackett_luce(law_theta, r));
    } while (std::next_permutation(r.begin(), r.end()));
    return tv / 2.0;
}

std::vector<Action> spaced(std::size_t n) {
    std::vector<Action> a;
    for (std::size_t i = 0; i < n; ++i) a.push_back(fixture::action(10 * i, 10 * i + 3));
    return a;
}

}  // namespace

TEST_SUITE("stage3") {

TEST_CASE("plackett-luce probabilities sum to one over all permutations") {
    Rng rng(61);
    for (std::size_t P = 1; P <= 5; ++P) {
        std::vector<double> theta(P);
        for (double& t : theta) t = rng.uniform(0.01, 1.0);
        Ranking r(P);
        std::iota(r.begin(), r.end(), 0);
        double total = 0.0;
        do {
            const double p = pl_probability(theta, r);
            CHECK(p == doctest::Approx(oracle::plackett_luce(theta, r)).epsilon(1e-12));
            total += p;
        } while (std::next_permutation(r.begin(), r.end()));
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("plackett-luce rejects bad input") {
    const std::vector<double> theta = {0.5, 0.2};
    CHECK_THROWS_AS(pl_probability(theta, std::vector<std::size_t>{0, 0}), DomainError);
    CHECK_THROWS_AS(pl_probability(theta, std::vector<std::size_t>{0}), DomainError);
    CHECK_THROWS_AS(pl_probability(std::vector<double>{0.5, 0.0}, std::vector<std::size_t>{0, 1}), DomainError);
    CHECK_THROWS_AS(sample_ranking(theta, -1.0, 1), DomainError);
}

TEST_CASE("gumbel argsort samples the plackett-luce law") {
    const std::vector<double> theta = {1.0, 2.0, 3.0, 4.0};
    CHECK(tv_distance(theta, theta, 1.0, 20000, 1) < 0.05);
    // Noise of scale sigma samples the law of theta^(1/sigma).
    std::vector<double> root(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) root[i] = std::sqrt(theta[i]);
    CHECK(tv_distance(theta, root, 2.0, 20000, 2) < 0.05);
}

TEST_CASE("vanishing noise gives the descending order") {
    const std::vector<double> theta = {0.2, 0.9, 0.5, 0.7};
    const Ranking desc = {1, 3, 2, 0};
    for (std::uint64_t s = 0; s < 200; ++s) CHECK(sample_ranking(theta, 1e-6, s) == desc);
    CHECK(sample_ranking(theta, 0.0, 0) == desc);
    CHECK(sample_ranking(std::vector<double>{0.5, 0.5, 0.0, -1.0}, 0.0, 0) == Ranking{0, 1, 2, 3});
    CHECK(baseline_ranking(theta, BaselineRanking::score_descending, 9) == desc);
    const Ranking rnd = baseline_ranking(theta, BaselineRanking::random, 9);
    CHECK(std::is_permutation(rnd.begin(), rnd.end(), desc.begin()));
    CHECK(baseline_ranking(theta, BaselineRanking::random, 9) == rnd);
}

TEST_CASE("greedy assembly stops at the first misfit") {
    const std::vector<double> d = {50.0, 30.0, 40.0, 20.0};
    const auto props = spaced(4);
    const Ranking r = {2, 1, 0, 3};
    const auto c = assemble_summary(r, d, props, 100.0);
    CHECK(c.chosen == std::vector<std::size_t>{1, 2});
    CHECK(c.total == 70.0);
    CHECK(!c.over_budget);
    const auto skip = assemble_summary(r, d, props, 100.0, {.mode = AssemblyMode::skip_misfits});
    CHECK(skip.chosen == std::vector<std::size_t>{1, 2, 3});
    CHECK(skip.total == 90.0);
    CHECK(check_candidate(c, d, props).empty());
    CHECK(check_candidate(skip, d, props, {.mode = AssemblyMode::skip_misfits}).empty());
}

TEST_CASE("the top proposal enters even when it overshoots") {
    const auto props = spaced(2);
    const std::vector<double> small = {105.0, 10.0}, big = {120.0, 10.0};
    const auto a = assemble_summary(Ranking{0, 1}, small, props, 100.0);
    CHECK(a.chosen == std::vector<std::size_t>{0});
    CHECK(!a.over_budget);
    CHECK(check_candidate(a, small, props).empty());
    const auto b = assemble_summary(Ranking{0, 1}, big, props, 100.0);
    CHECK(b.over_budget);
    CHECK(!check_candidate(b, big, props).empty());
    CHECK_THROWS_AS(assemble_summary(Ranking{0, 1}, small, props, 0.0), DomainError);
}

TEST_CASE("candidate checker catches tampering") {
    const std::vector<double> d = {50.0, 30.0, 40.0, 20.0};
    const auto props = spaced(4);
    const auto good = assemble_summary(Ranking{0, 1, 2, 3}, d, props, 100.0);
    REQUIRE(check_candidate(good, d, props).empty());

    auto extra = good;
    extra.chosen = {0, 1, 3};
    extra.total = 100.0;
    CHECK(!check_candidate(extra, d, props).empty());

    auto missing = good;
    missing.chosen = {0};
    missing.total = 50.0;
    CHECK(!check_candidate(missing, d, props).empty());

    auto order = good;
    std::reverse(order.chosen.begin(), order.chosen.end());
    CHECK(!check_candidate(order, d, props).empty());
}

TEST_CASE("candidate j shares its noise stream across matches") {
    const std::vector<double> t1 = {0.3, 0.6, 0.1}, t2 = {0.9, 0.2, 0.4, 0.8};
    const auto p1 = spaced(3), p2 = spaced(4);
    const auto c1 = generate_candidates(t1, std::vector<double>(3, 20.0), p1, 50.0, 5, 1.0, 77);
    const auto c2 = generate_candidates(t2, std::vector<double>(4, 20.0), p2, 50.0, 5, 1.0, 77);
    REQUIRE(c1.size() == 5);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(c1[j].sample_index == j);
        CHECK(c1[j].ranking == sample_ranking(t1, 1.0, derive_seed(77, {j})));
        CHECK(c2[j].ranking == sample_ranking(t2, 1.0, derive_seed(77, {j})));
        CHECK(check_candidate(c1[j], std::vector<double>(3, 20.0), p1).empty());
    }
}

TEST_CASE("best candidate is the first maximum") {
    const std::vector<double> s = {0.2, 0.7, 0.5, 0.7};
    CHECK(select_best_candidate(4, [&](std::size_t j) { return s[j]; }) == 1);
    CHECK_THROWS_AS(select_best_candidate(0, [](std::size_t) { return 0.0; }), std::invalid_argument);
}

}  // TEST_SUITE
