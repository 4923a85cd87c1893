#include "soccersum/eval/metrics.hpp"

#include <limits>

namespace soccersum::eval {

double fbeta(double precision, double recall, double beta) {
    const double b2 = beta * beta;
    const double denom = b2 * precision + recall;
    if (denom <= 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / denom;
}

double Counts::precision() const noexcept {
    return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Counts::recall() const noexcept {
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Counts::fbeta(double beta) const noexcept { return eval::fbeta(precision(), recall(), beta); }

double Counts::missing_rate() const noexcept { return 100.0 - 100.0 * recall(); }

MatchResult overlap_match(std::span<const Action> predicted, std::span<const Action> reference, double ratio) {
    MatchResult r;
    r.gt_hit.assign(reference.size(), false);
    r.predicted_tp.assign(predicted.size(), false);
    for (std::size_t p = 0; p < predicted.size(); ++p) {
        const Action& a = predicted[p];
        const double len = static_cast<double>(a.length());
        std::size_t best = reference.size();
        std::size_t best_overlap = 0;
        for (std::size_t g = 0; g < reference.size(); ++g) {
            if (r.gt_hit[g]) continue;
            const Action& ref = reference[g];
            const std::size_t lo = std::max(a.start, ref.start);
            const std::size_t hi = std::min(a.end, ref.end);
            if (lo > hi) continue;
            const std::size_t overlap = hi - lo + 1;
            if (static_cast<double>(overlap) >= ratio * len && overlap > best_overlap) {
                best = g;
                best_overlap = overlap;
            }
        }
        if (best < reference.size()) {
            r.gt_hit[best] = true;
            r.predicted_tp[p] = true;
            ++r.counts.tp;
        }
    }
    r.counts.fp = predicted.size() - r.counts.tp;
    r.counts.fn = reference.size() - r.counts.tp;
    return r;
}

MatchResult match_summary_actions(std::span<const Action> predicted, std::span<const Action> reference,
                                  const Match& match) {
    MatchResult r;
    r.gt_hit.assign(reference.size(), false);
    r.predicted_tp.assign(predicted.size(), false);
    if (match.events.empty()) return r;
    const double match_start = match.events.front().t;
    const double match_end = match.events.back().t;
    for (std::size_t j = 0; j < reference.size(); ++j) {
        const double lo = j == 0 ? match_start : match.events.at(reference[j - 1].end).t;
        const double hi = j + 1 == reference.size() ? match_end : match.events.at(reference[j + 1].start).t;
        std::size_t chosen = predicted.size();
        double chosen_t = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < predicted.size(); ++p) {
            if (r.predicted_tp[p] || predicted[p].type != reference[j].type) continue;
            const double t = match.events.at(predicted[p].start).t;
            if (t >= lo && t <= hi && t < chosen_t) {
                chosen = p;
                chosen_t = t;
            }
        }
        if (chosen < predicted.size()) {
            r.predicted_tp[chosen] = true;
            r.gt_hit[j] = true;
            ++r.counts.tp;
        }
    }
    r.counts.fp = predicted.size() - r.counts.tp;
    r.counts.fn = reference.size() - r.counts.tp;
    return r;
}

}  // namespace soccersum::eval
