#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "soccersum/core/types.hpp"

namespace soccersum::stage3 {

// ranking[position] = proposal index.
using Ranking = std::vector<std::size_t>;

inline constexpr double kThetaFloor = 1e-9;

// Clamps scores from below at kThetaFloor.
std::vector<double> clamp_theta(std::span<const double> theta);

// Plackett-Luce probability of `ranking`. DomainError for theta <= 0 or a
// ranking that is not a permutation of [0, P).
double pl_probability(std::span<const double> theta, std::span<const std::size_t> ranking);

// Argsort of log(theta) + g descending with g ~ Gumbel(0, sigma) drawn by
// inverse CDF, -sigma log(-log U). Ties keep the lower index first; sigma = 0
// consumes no randomness and is a plain descending sort.
Ranking sample_ranking(std::span<const double> theta, double sigma, std::uint64_t seed);

enum class BaselineRanking { score_descending, random };
Ranking baseline_ranking(std::span<const double> theta, BaselineRanking mode, std::uint64_t seed);

enum class AssemblyMode {
    stop_at_first_misfit,  // greedy in rank order, stop at the first proposal that does not fit
    skip_misfits,          // keep walking past proposals that do not fit
};

struct AssemblyConfig {
    double tolerance = 0.1;  // overshoot allowed for the top-ranked proposal only
    AssemblyMode mode = AssemblyMode::stop_at_first_misfit;
};

struct CandidateSummary {
    std::size_t sample_index = 0;
    Ranking ranking;
    std::vector<std::size_t> chosen;  // proposal indices, chronological
    std::vector<double> durations;    // parallel to `chosen`
    double total = 0.0;
    double budget = 0.0;
    bool over_budget = false;  // top proposal alone exceeded budget * (1 + tolerance)
};

// `durations[p]` and `proposals[p]` describe proposal p; clips are returned in
// chronological order of their first event.
CandidateSummary assemble_summary(std::span<const std::size_t> ranking, std::span<const double> durations,
                                  std::span<const Action> proposals, double budget, const AssemblyConfig& config = {});

// Sample j is drawn with seed derive_seed(seed, {j}), so index j refers to the
// same noise stream in every match.
std::vector<CandidateSummary> generate_candidates(std::span<const double> theta, std::span<const double> durations,
                                                  std::span<const Action> proposals, double budget, std::size_t k,
                                                  double sigma, std::uint64_t seed, const AssemblyConfig& config = {});

// Checks the stop rule, the budget bound and chronological order. Returns an
// empty string when the candidate is valid, otherwise the first violation.
std::string check_candidate(const CandidateSummary& candidate, std::span<const double> durations,
                            std::span<const Action> proposals, const AssemblyConfig& config = {});

// Index with the largest validation score, lowest index on ties.
std::size_t select_best_candidate(std::size_t k, const std::function<double(std::size_t)>& validation_score);

}  // namespace soccersum::stage3
