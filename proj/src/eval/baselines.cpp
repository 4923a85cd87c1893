#include "soccersum/eval/baselines.hpp"

#include "soccersum/core/random.hpp"

namespace soccersum::eval {

std::string_view to_string(SoccerBaseline b) {
    switch (b) {
        case SoccerBaseline::random: return "Random";
        case SoccerBaseline::goals: return "Only Goals";
        case SoccerBaseline::shots_on_target: return "Shots on Target";
    }
    return "?";
}

std::vector<Action> soccer_baseline(SoccerBaseline mode, std::span<const Action> proposals, std::uint64_t seed) {
    std::vector<Action> out;
    Rng rng(seed);
    for (const Action& a : proposals) {
        bool keep = false;
        switch (mode) {
            case SoccerBaseline::random: keep = rng.uniform01() >= 0.5; break;
            case SoccerBaseline::goals: keep = a.type == SummaryActionType::goal; break;
            case SoccerBaseline::shots_on_target:
                keep = a.type == SummaryActionType::goal || a.type == SummaryActionType::save ||
                       a.type == SummaryActionType::shot;
                break;
        }
        if (keep) out.push_back(a);
    }
    return out;
}

}  // namespace soccersum::eval
