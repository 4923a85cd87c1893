#pragma once

#include <span>
#include <vector>

#include "soccersum/core/types.hpp"
#include "soccersum/eval/metrics.hpp"
#include "soccersum/stage1/vocabulary.hpp"

namespace soccersum::stage1 {

// Maximal runs of events scoring >= threshold. Inside a run, a goal-shot
// event closes its proposal and the following event opens a new one.
std::vector<Action> extract_proposals(std::span<const double> scores, double threshold, const Match& match);

struct ScoredMatch {
    const Match* match = nullptr;
    std::vector<double> scores;
    const std::vector<Action>* reference = nullptr;
};

struct ThresholdChoice {
    double threshold = 0.5;
    double f2 = 0.0;
    eval::Counts counts;
};

// Proposal-level counts at a fixed threshold under the overlap rule.
eval::Counts proposal_counts(std::span<const ScoredMatch> matches, double threshold, double overlap_ratio = 0.5);

// Grid 0.01, 0.02, ..., 0.99; maximises F2 summed over matches, lowest
// threshold on ties. DataError when there is no reference action at all.
ThresholdChoice select_threshold(std::span<const ScoredMatch> matches, double overlap_ratio = 0.5);

// Template-matching labeller: proposals are exact vocabulary occurrences.
std::vector<Action> template_proposals(const Match& match, const ActionVocabulary& vocab);

}  // namespace soccersum::stage1
