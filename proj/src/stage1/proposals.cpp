#include "soccersum/stage1/proposals.hpp"

#include <cmath>
#include <optional>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/match.hpp"

namespace soccersum::stage1 {

std::vector<Action> extract_proposals(std::span<const double> scores, double threshold, const Match& match) {
    if (scores.size() != match.events.size()) throw ShapeError("extract_proposals: one score per event required");
    std::optional<EventTypeId> goal_shot;
    if (match.vocabulary) goal_shot = match.vocabulary->find("goal-shot");

    std::vector<Action> out;
    std::optional<std::size_t> open;
    auto close = [&](std::size_t end) {
        Action a;
        a.start = *open;
        a.end = end;
        a.type = action_type(a, match);
        out.push_back(a);
        open.reset();
    };
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] >= threshold) {
            if (!open) open = i;
            if (goal_shot && match.events[i].type == *goal_shot) close(i);
        } else if (open) {
            close(i - 1);
        }
    }
    if (open) close(scores.size() - 1);
    return out;
}

eval::Counts proposal_counts(std::span<const ScoredMatch> matches, double threshold, double overlap_ratio) {
    eval::Counts total;
    for (const ScoredMatch& m : matches) {
        const auto proposals = extract_proposals(m.scores, threshold, *m.match);
        total += eval::overlap_match(proposals, *m.reference, overlap_ratio).counts;
    }
    return total;
}

ThresholdChoice select_threshold(std::span<const ScoredMatch> matches, double overlap_ratio) {
    std::size_t positives = 0;
    for (const ScoredMatch& m : matches) positives += m.reference->size();
    if (positives == 0) throw DataError("select_threshold: no reference actions to tune against");
    ThresholdChoice best;
    best.f2 = -1.0;
    for (int k = 1; k <= 99; ++k) {
        const double t = k / 100.0;
        const eval::Counts c = proposal_counts(matches, t, overlap_ratio);
        const double f2 = c.fbeta(2.0);
        if (f2 > best.f2) best = {t, f2, c};
    }
    return best;
}

std::vector<Action> template_proposals(const Match& match, const ActionVocabulary& vocab) {
    return find_vocabulary_occurrences(match, vocab);
}

}  // namespace soccersum::stage1
