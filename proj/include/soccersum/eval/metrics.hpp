#pragma once

#include <span>
#include <vector>

#include "soccersum/core/types.hpp"

namespace soccersum::eval {

// (1 + b^2) P R / (b^2 P + R); 0 when P = R = 0.
double fbeta(double precision, double recall, double beta);

struct Counts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double precision() const noexcept;
    double recall() const noexcept;
    double fbeta(double beta) const noexcept;
    // False-negative rate over reference actions, in percent (100 - recall%).
    double missing_rate() const noexcept;

    Counts& operator+=(const Counts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

struct MatchResult {
    std::vector<bool> gt_hit;        // per reference action
    std::vector<bool> predicted_tp;  // per predicted action
    Counts counts;
};

// Interval matching on event indices: a prediction is a true positive when at
// least `ratio` of its events lie inside one still-unmatched reference action
// (boundary inclusive). Predictions are visited in order and take the
// reference with the largest overlap, lowest index on ties.
MatchResult overlap_match(std::span<const Action> predicted, std::span<const Action> reference, double ratio = 0.5);

// Type + neighbourhood matching of summaries. Reference action j is hit by an
// unused prediction of the same summary type whose first-event timestamp lies
// in [end of reference j-1, start of reference j+1], with the first and last
// event timestamps of the match standing in at the ends. References are
// visited in order; each takes the earliest-starting eligible prediction.
// Predictions and references must be chronological.
MatchResult match_summary_actions(std::span<const Action> predicted, std::span<const Action> reference,
                                  const Match& match);

}  // namespace soccersum::eval
