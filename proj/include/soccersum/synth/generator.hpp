#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "soccersum/core/dataset.hpp"
#include "soccersum/core/types.hpp"

namespace soccersum::synth {

struct GenConfig {
    std::size_t matches = 60;
    double events_per_match = 1500.0;
    double events_sd = 100.0;
    std::size_t actions_per_match = 24;
    std::size_t max_goals = 3;
    // Share of non-goal, non-period actions planted verbatim from the pattern
    // library; the rest are noised and never enter a summary.
    double clean_fraction = 0.3;
    double insertion_rate = 0.1;
    double swap_rate = 0.1;
    std::size_t min_background_gap = 12;
    double budget_min = 110.0;
    double budget_max = 270.0;
    double min_fill = 0.75;  // summary must reach this share of the budget
    double audio_gain = 10.0;
    double audio_rate = 8000.0;
    double audio_amplitude = 0.05;
    PaddingConfig pad{};
    std::uint64_t seed = 7;

    void validate() const;  // throws std::invalid_argument
    nlohmann::json to_json() const;
    static GenConfig from_json(const nlohmann::json& j);
};

struct PatternStep {
    std::string type;
    bool attacking = true;  // event belongs to the attacking team
};

struct Pattern {
    std::string name;
    std::vector<PatternStep> steps;
    bool goal = false;
    enum class Kind { open_play, period_start, period_end } kind = Kind::open_play;
};

// The fixed action-pattern library every generated summary action is drawn from.
const std::vector<Pattern>& pattern_library();

struct GeneratedMatch {
    Match match;
    std::vector<Action> summary;    // ground truth, chronological
    std::vector<Action> reference;  // every planted action, in_summary set
    double budget = 0.0;            // sampled target duration
};

// Throws DataError when the sampled budget cannot be filled.
GeneratedMatch generate_match(const GenConfig& config, std::size_t match_index, std::uint64_t seed,
                              std::shared_ptr<const EventVocabulary> vocabulary);

// Seed of match i is derive_seed(config.seed, {i}).
Dataset generate_dataset(const GenConfig& config);

std::string match_id(std::size_t index);

}  // namespace soccersum::synth
