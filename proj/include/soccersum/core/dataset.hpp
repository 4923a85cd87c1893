#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include <json.hpp>

#include "soccersum/core/types.hpp"

namespace soccersum {

// A corpus of matches with their ground-truth summaries. `reference_actions`
// optionally lists every annotated action of a match (summary or not); it is
// present for generated corpora and used as the proposal-stage reference.
struct Dataset {
    std::shared_ptr<const EventVocabulary> vocabulary;
    std::vector<Match> matches;
    std::vector<std::vector<Action>> summaries;
    std::vector<std::vector<Action>> reference_actions;

    bool has_reference_actions() const noexcept { return !reference_actions.empty(); }
    std::size_t find_match(const std::string& id) const;  // throws std::out_of_range
};

// On-disk layout under `dir`:
//   dataset.json    vocabulary, match metadata, provenance
//   events.jsonl    one event object per line
//   summaries.json  ground-truth summary actions per match
//   actions.json    reference actions per match (optional)
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                   const nlohmann::json& provenance = nlohmann::json::object());

// Throws ParseError (with line numbers for events.jsonl) or VocabularyError.
Dataset read_dataset(const std::filesystem::path& dir);

// Provenance object stored in dataset.json (empty object when absent).
nlohmann::json read_dataset_provenance(const std::filesystem::path& dir);

// Single-line JSONL rendering of one event; floats use 6 decimals.
std::string event_to_jsonl(const Event& e, const std::string& match_id, const EventVocabulary& vocab);

nlohmann::json actions_to_json(const std::vector<Action>& actions, bool with_summary_flag);
std::vector<Action> actions_from_json(const nlohmann::json& arr, const Match& match);

}  // namespace soccersum
