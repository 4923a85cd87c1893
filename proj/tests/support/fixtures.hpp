#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "soccersum/core/random.hpp"
#include "soccersum/core/types.hpp"

namespace fixture {

inline std::shared_ptr<const soccersum::EventVocabulary> vocabulary() {
    static const auto v =
        std::make_shared<const soccersum::EventVocabulary>(soccersum::EventVocabulary::default_vocabulary());
    return v;
}

// Events of the given types, `dt` seconds apart starting at t = 0.
inline soccersum::Match match(const std::vector<std::string>& types, double dt = 3.0, std::string id = "m0") {
    soccersum::Match m;
    m.id = std::move(id);
    m.vocabulary = vocabulary();
    for (std::size_t i = 0; i < types.size(); ++i) {
        soccersum::Event e;
        e.index = i;
        e.t = dt * static_cast<double>(i);
        e.type = m.vocabulary->id(types[i]);
        e.start = {50.0, 50.0};
        e.end = {60.0, 40.0};
        m.events.push_back(e);
    }
    return m;
}

inline soccersum::Action action(std::size_t start, std::size_t end,
                                soccersum::SummaryActionType type = soccersum::SummaryActionType::other) {
    return soccersum::Action{start, end, type, std::nullopt};
}

// `n` disjoint chronological actions over [0, events) with types drawn from
// the first `types` categories; lengths 1..4.
inline std::vector<soccersum::Action> random_actions(soccersum::Rng& rng, std::size_t events, std::size_t n,
                                                    std::size_t types) {
    std::vector<soccersum::Action> out;
    const std::size_t slot = events / std::max<std::size_t>(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t len = 1 + rng.below(std::min<std::size_t>(4, slot));
        const std::size_t start = i * slot + rng.below(slot - len + 1);
        out.push_back(action(start, start + len - 1, static_cast<soccersum::SummaryActionType>(rng.below(types))));
    }
    return out;
}

// Match of `events` passes with irregular gaps of 0.5 to 5 seconds.
inline soccersum::Match random_timeline(soccersum::Rng& rng, std::size_t events) {
    soccersum::Match m = match(std::vector<std::string>(events, "pass"));
    double t = rng.uniform(0.0, 3.0);
    for (auto& e : m.events) {
        e.t = t;
        t += rng.uniform(0.5, 5.0);
    }
    return m;
}

}  // namespace fixture
