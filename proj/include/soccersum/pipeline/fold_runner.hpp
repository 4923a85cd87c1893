#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "soccersum/pipeline/artifacts.hpp"
#include "soccersum/pipeline/config.hpp"

namespace soccersum::pipeline {

// Output tree of one run:
//   data/                      dataset files
//   features/<match>.csv       per-event metadata and audio features
//   features/codebook.json     qualifier codebook
//   models/fold<i>/            mil.ckpt, hma.ckpt, vocabulary.json, reports
//   scores/fold<i>/scores.csv  per-event proposal scores
//   proposals/fold<i>/proposals.json
//   theta/fold<i>/theta.csv
//   candidates/fold<i>/<match>/candidate_<j>.json, selection.json
//   results/                   fold<i>.json, results.csv, results.txt
struct Workspace {
    std::filesystem::path root;
    PipelineConfig config;
    std::size_t jobs = 1;
    std::ostream* log = nullptr;

    RunStamp stamp() const { return {config.hash_hex(), config.seed()}; }
};

void gen_data(const Workspace& ws);
void extract_features(const Workspace& ws);
void train_proposals(const Workspace& ws, std::size_t fold);
void score_events(const Workspace& ws, std::size_t fold);
void extract_proposals(const Workspace& ws, std::size_t fold);
void train_hma(const Workspace& ws, std::size_t fold);
// Scores proposals, emits k candidates per match and picks the best index on
// the validation shard.
void summarize(const Workspace& ws, std::size_t fold);

// Metrics of one fold; runs any missing per-fold step first.
nlohmann::json evaluate_fold(const Workspace& ws, std::size_t fold);

// Evaluates the first min(folds, max_folds) folds and writes the tables.
void evaluate(const Workspace& ws);

// Every step from data generation to the tables, regenerating all artifacts.
void run_e2e(const Workspace& ws);

// Aligned-text and CSV renderings of the aggregated tables.
std::string render_results_text(const nlohmann::json& totals);
std::string render_results_csv(const nlohmann::json& totals);

}  // namespace soccersum::pipeline
