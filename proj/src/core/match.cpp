#include "soccersum/core/match.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace soccersum {
namespace {

constexpr std::array kPriority{
    SummaryActionType::goal,         SummaryActionType::var,        SummaryActionType::save,
    SummaryActionType::shot,         SummaryActionType::free_kick,  SummaryActionType::corner,
    SummaryActionType::foul,         SummaryActionType::start_period, SummaryActionType::end_period,
};

bool in_field(const Point& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.x <= kFieldMax && p.y >= 0.0 &&
           p.y <= kFieldMax;
}

void check_range(const Action& action, const Match& match) {
    if (action.start > action.end || action.end >= match.events.size()) {
        throw std::out_of_range("action range [" + std::to_string(action.start) + ", " +
                                std::to_string(action.end) + "] invalid for match '" + match.id + "' with " +
                                std::to_string(match.events.size()) + " events");
    }
}

}  // namespace

std::size_t ValidationReport::count(ViolationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate_match(const Match& match) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::size_t i, std::string msg) {
        report.violations.push_back({kind, i, std::move(msg)});
    };
    if (match.events.empty()) add(ViolationKind::empty_match, 0, "match has no events (F >= 1 violated)");
    for (std::size_t i = 0; i < match.events.size(); ++i) {
        const Event& e = match.events[i];
        if (e.index != i) add(ViolationKind::bad_index, i, "event index " + std::to_string(e.index) + " at position " + std::to_string(i));
        if (!std::isfinite(e.t) || e.t < 0.0) add(ViolationKind::non_monotone_timestamp, i, "negative or non-finite timestamp");
        if (i > 0 && e.t < match.events[i - 1].t) {
            add(ViolationKind::non_monotone_timestamp, i, "timestamp decreases from previous event");
        }
        if (!in_field(e.start)) add(ViolationKind::out_of_bounds, i, "start location outside [0,100]^2");
        if (!in_field(e.end)) add(ViolationKind::out_of_bounds, i, "end location outside [0,100]^2");
        if (match.vocabulary == nullptr || !match.vocabulary->contains(e.type)) {
            add(ViolationKind::unknown_type, i, "event type id " + std::to_string(e.type.value) + " not in vocabulary");
        }
        if (e.team != 0 && e.team != 1) add(ViolationKind::bad_team, i, "team must be 0 or 1");
    }
    return report;
}

std::vector<int> event_halves(const Match& match) {
    std::vector<int> halves(match.events.size(), 0);
    if (match.vocabulary == nullptr) return halves;
    const auto start = match.vocabulary->find("start-period");
    if (!start) return halves;
    int seen = 0;
    for (std::size_t i = 0; i < match.events.size(); ++i) {
        if (match.events[i].type == *start) ++seen;
        halves[i] = seen >= 2 ? 1 : 0;
    }
    return halves;
}

SummaryActionType action_type(const Action& action, const Match& match) {
    check_range(action, match);
    std::array<bool, kSummaryActionTypeCount> present{};
    for (std::size_t i = action.start; i <= action.end; ++i) {
        if (auto cat = match.vocabulary->summary_category(match.events[i].type)) {
            present[static_cast<std::size_t>(*cat)] = true;
        }
    }
    for (SummaryActionType t : kPriority) {
        if (present[static_cast<std::size_t>(t)]) return t;
    }
    return SummaryActionType::other;
}

double action_duration(const Action& action, const Match& match, const PaddingConfig& pad) {
    check_range(action, match);
    return (match.events[action.end].t - match.events[action.start].t) + pad.pre + pad.post;
}

double summary_duration(const std::vector<Action>& actions, const Match& match, const PaddingConfig& pad) {
    double total = 0.0;
    for (const Action& a : actions) total += action_duration(a, match, pad);
    return total;
}

}  // namespace soccersum
