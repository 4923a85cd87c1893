#include <cmath>
#include <numbers>
#include <numeric>

#include <doctest.h>

#include "../support/fixtures.hpp"
#include "soccersum/core/errors.hpp"
#include "soccersum/features/metadata.hpp"
#include "soccersum/features/scaler.hpp"

using namespace soccersum;
using namespace soccersum::features;

TEST_SUITE("features") {

TEST_CASE("goal geometry") {
    const Point goal{100.0, 50.0};
    auto g = geometry_to_goal({90.0, 50.0}, goal);
    CHECK(g.distance == doctest::Approx(0.1));
    CHECK(g.angle == 0.0);
    g = geometry_to_goal({100.0, 60.0}, goal);
    CHECK(g.angle == doctest::Approx(-std::numbers::pi / 2));
    g = geometry_to_goal({97.0, 46.0}, goal);
    CHECK(g.distance == doctest::Approx(0.05));
    CHECK(geometry_to_goal({110.0, 50.0}, goal).angle == doctest::Approx(std::numbers::pi));
    CHECK(geometry_to_goal(goal, goal).distance == 0.0);
}

TEST_CASE("qualifier codebook keeps the most frequent codes") {
    Match m = fixture::match({"pass", "pass", "pass", "pass", "pass", "pass"});
    const int q[] = {4, 4, 9, 9, 2, 7};
    for (std::size_t i = 0; i < 6; ++i) m.events[i].qualifier = q[i];
    const std::vector<Match> ms = {m};
    const auto cb = QualifierCodebook::fit(ms, 3);
    CHECK(cb.codes() == std::vector<int>{4, 9});
    CHECK(cb.slot(4) == 0);
    CHECK(cb.slot(9) == 1);
    CHECK(cb.slot(2) == 2);
    CHECK(cb.slot(123) == 2);
    CHECK_THROWS_AS(QualifierCodebook(2, {1, 2}), std::invalid_argument);
}

TEST_CASE("metadata rows encode location, timing, direction and one-hots") {
    Match m = fixture::match({"start-period", "pass", "end-period", "start-period", "shot"}, 2.0);
    m.events[1].start = {80.0, 50.0};
    m.events[4].start = {20.0, 50.0};
    m.events[4].outcome = true;
    m.events[4].qualifier = 5;
    const QualifierCodebook cb(4, {5});
    const RowMatrix rows = encode_match_metadata(m, cb);
    REQUIRE(rows.cols() == metadata_width(18, 4));
    CHECK(rows(0, meta::time_elapsed) == 0.0);
    CHECK(rows(1, meta::time_elapsed) == 2.0);
    CHECK(rows(1, meta::sx) == doctest::Approx(0.8));
    // Team 0 attacks right in the first half and left in the second.
    CHECK(rows(1, meta::start_dist) == doctest::Approx(0.2));
    CHECK(rows(4, meta::start_dist) == doctest::Approx(0.2));
    CHECK(rows(4, meta::outcome) == 1.0);
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        double types = 0.0, quals = 0.0;
        for (std::size_t c = 0; c < 18; ++c) types += rows(r, meta::type_onehot + c);
        for (std::size_t c = 0; c < 4; ++c) quals += rows(r, meta::type_onehot + 18 + c);
        CHECK(types == 1.0);
        CHECK(quals == 1.0);
    }
    CHECK(rows(4, meta::type_onehot + fixture::vocabulary()->id("shot").value) == 1.0);
    CHECK(rows(4, meta::type_onehot + 18 + 0) == 1.0);
    CHECK(rows(3, meta::type_onehot + 18 + 3) == 1.0);

    Event alien = m.events[0];
    alien.type = EventTypeId{200};
    CHECK_THROWS_AS(encode_event_metadata(alien, nullptr, true, *m.vocabulary, cb), VocabularyError);
}

TEST_CASE("scaler z-scores columns and leaves constant columns unscaled") {
    RowMatrix a(3, 2), b(1, 2);
    a(0, 0) = 1.0, a(1, 0) = 2.0, a(2, 0) = 3.0;
    b(0, 0) = 4.0;
    for (std::size_t r = 0; r < 3; ++r) a(r, 1) = 7.0;
    b(0, 1) = 7.0;
    const std::vector<RowMatrix> tables = {a, b};
    const auto s = FeatureScaler::fit(tables);
    CHECK(s.mean()[0] == doctest::Approx(2.5));
    CHECK(s.scale()[1] == 1.0);
    const RowMatrix t = s.transform(b);
    CHECK(t(0, 1) == 0.0);
    CHECK(t(0, 0) == doctest::Approx(1.5 / std::sqrt(1.25)));
    const auto back = FeatureScaler::from_json(s.to_json());
    CHECK(back.mean() == s.mean());
    CHECK(back.scale() == s.scale());
    CHECK_THROWS_AS(s.transform(RowMatrix(1, 3)), ShapeError);
}

}  // TEST_SUITE
