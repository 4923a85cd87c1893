#pragma once

#include <string>
#include <vector>

#include "soccersum/core/types.hpp"

namespace soccersum {

enum class ViolationKind { non_monotone_timestamp, out_of_bounds, unknown_type, bad_index, bad_team, empty_match };

struct Violation {
    ViolationKind kind;
    std::size_t event_index;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
    std::size_t count(ViolationKind kind) const;
};

ValidationReport validate_match(const Match& match);

// Per-event half index (0 or 1); see Match::half_of.
std::vector<int> event_halves(const Match& match);

// Summary category of an action: the highest-priority category among its
// events, in the order goal > var > save > shot > free-kick > corner > foul >
// start-period > end-period, or `other` when none applies.
// Throws std::out_of_range for an invalid event range.
SummaryActionType action_type(const Action& action, const Match& match);

// Span between first and last event timestamps plus fixed padding.
double action_duration(const Action& action, const Match& match, const PaddingConfig& pad = {});

// Sum of action durations.
double summary_duration(const std::vector<Action>& actions, const Match& match, const PaddingConfig& pad = {});

}  // namespace soccersum
