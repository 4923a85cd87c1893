#include "soccersum/stage3/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"

namespace soccersum::stage3 {
namespace {

Ranking argsort_desc(std::span<const double> keys) {
    Ranking r(keys.size());
    std::iota(r.begin(), r.end(), 0);
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
    return r;
}

}  // namespace

std::vector<double> clamp_theta(std::span<const double> theta) {
    std::vector<double> out(theta.begin(), theta.end());
    for (double& v : out) v = std::max(v, kThetaFloor);
    return out;
}

double pl_probability(std::span<const double> theta, std::span<const std::size_t> ranking) {
    const std::size_t P = theta.size();
    if (ranking.size() != P) throw DomainError("pl_probability: ranking length differs from theta");
    std::vector<bool> seen(P, false);
    for (std::size_t idx : ranking) {
        if (idx >= P || seen[idx]) throw DomainError("pl_probability: ranking is not a permutation");
        seen[idx] = true;
    }
    for (double t : theta)
        if (!(t > 0.0)) throw DomainError("pl_probability: weights must be positive");
    double tail = 0.0;
    for (double t : theta) tail += t;
    double p = 1.0;
    for (std::size_t pos = 0; pos < P; ++pos) {
        const double t = theta[ranking[pos]];
        p *= t / tail;
        tail -= t;
    }
    return p;
}

Ranking sample_ranking(std::span<const double> theta, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw DomainError("sample_ranking: sigma must be non-negative");
    const auto clamped = clamp_theta(theta);
    std::vector<double> keys(clamped.size());
    if (sigma == 0.0) return argsort_desc(clamped);
    Rng rng(seed);
    for (std::size_t p = 0; p < keys.size(); ++p) keys[p] = std::log(clamped[p]) - sigma * std::log(-std::log(rng.uniform01()));
    return argsort_desc(keys);
}

Ranking baseline_ranking(std::span<const double> theta, BaselineRanking mode, std::uint64_t seed) {
    if (mode == BaselineRanking::score_descending) return sample_ranking(theta, 0.0, seed);
    Ranking r(theta.size());
    std::iota(r.begin(), r.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(r));
    return r;
}

CandidateSummary assemble_summary(std::span<const std::size_t> ranking, std::span<const double> durations,
                                  std::span<const Action> proposals, double budget, const AssemblyConfig& config) {
    if (!(budget > 0.0)) throw DomainError("assemble_summary: budget must be positive");
    if (durations.size() != proposals.size() || ranking.size() != proposals.size())
        throw ShapeError("assemble_summary: ranking, durations and proposals must align");
    CandidateSummary c;
    c.ranking.assign(ranking.begin(), ranking.end());
    c.budget = budget;
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const std::size_t p = ranking[pos];
        const double d = durations[p];
        if (pos == 0 && d > budget) {
            // The top proposal always enters; only it may overshoot.
            c.chosen.push_back(p);
            c.total = d;
            c.over_budget = d > budget * (1.0 + config.tolerance);
            break;
        }
        if (c.total + d <= budget) {
            c.chosen.push_back(p);
            c.total += d;
        } else if (config.mode == AssemblyMode::stop_at_first_misfit) {
            break;
        }
    }
    std::sort(c.chosen.begin(), c.chosen.end(), [&](std::size_t a, std::size_t b) {
        return proposals[a].start != proposals[b].start ? proposals[a].start < proposals[b].start : a < b;
    });
    for (std::size_t p : c.chosen) c.durations.push_back(durations[p]);
    return c;
}

std::vector<CandidateSummary> generate_candidates(std::span<const double> theta, std::span<const double> durations,
                                                  std::span<const Action> proposals, double budget, std::size_t k,
                                                  double sigma, std::uint64_t seed, const AssemblyConfig& config) {
    std::vector<CandidateSummary> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const Ranking r = sample_ranking(theta, sigma, derive_seed(seed, {j}));
        CandidateSummary c = assemble_summary(r, durations, proposals, budget, config);
        c.sample_index = j;
        out.push_back(std::move(c));
    }
    return out;
}

std::string check_candidate(const CandidateSummary& c, std::span<const double> durations,
                            std::span<const Action> proposals, const AssemblyConfig& config) {
    if (c.total > c.budget * (1.0 + config.tolerance) + 1e-9) return "total exceeds budget by more than the tolerance";
    double sum = 0.0;
    for (std::size_t i = 0; i < c.chosen.size(); ++i) {
        sum += durations[c.chosen[i]];
        if (i > 0 && proposals[c.chosen[i - 1]].start >= proposals[c.chosen[i]].start) return "clips not chronological";
    }
    if (std::abs(sum - c.total) > 1e-9) return "total does not match chosen durations";
    // Replay the rank walk: chosen must be exactly the admitted prefix.
    std::vector<bool> in(durations.size(), false);
    for (std::size_t p : c.chosen) in[p] = true;
    double running = 0.0;
    bool stopped = false;
    for (std::size_t pos = 0; pos < c.ranking.size(); ++pos) {
        const std::size_t p = c.ranking[pos];
        const bool fits = (pos == 0) || running + durations[p] <= c.budget;
        if (stopped) {
            if (in[p]) return "proposal admitted after the stop point";
            continue;
        }
        if (fits) {
            if (!in[p]) return "fitting proposal left out before the stop point";
            running += durations[p];
            if (pos == 0 && durations[p] > c.budget) stopped = true;
        } else {
            if (in[p]) return "non-fitting proposal admitted";
            if (config.mode == AssemblyMode::stop_at_first_misfit) stopped = true;
        }
    }
    return {};
}

std::size_t select_best_candidate(std::size_t k, const std::function<double(std::size_t)>& validation_score) {
    if (k == 0) throw std::invalid_argument("select_best_candidate: no candidates");
    std::size_t best = 0;
    double best_score = validation_score(0);
    for (std::size_t j = 1; j < k; ++j) {
        const double s = validation_score(j);
        if (s > best_score) {
            best = j;
            best_score = s;
        }
    }
    return best;
}

}  // namespace soccersum::stage3
