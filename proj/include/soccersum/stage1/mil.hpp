#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "soccersum/core/matrix.hpp"
#include "soccersum/features/scaler.hpp"
#include "soccersum/nn/adam.hpp"
#include "soccersum/nn/lstm.hpp"
#include "soccersum/nn/tape.hpp"
#include "soccersum/stage1/bags.hpp"
#include "soccersum/stage1/proposals.hpp"

namespace soccersum::stage1 {

enum class LseMode {
    standard,  // r^-1 log((1/N) sum exp(r O))
    literal,   // r^-1 log((1/N) sum r O), diagnostic only
};

// Smooth maximum of the bag scores covering one event.
double lse_fuse(std::span<const double> bag_scores, double r, LseMode mode = LseMode::standard);

struct ScoringConfig {
    std::size_t window = 5;  // no longer than the shortest planted action
    std::size_t stride = 2;
    double r = 8.0;
    LseMode mode = LseMode::standard;
};

// Sliding bags over [0, F): starts 0, s, 2s, ... while a full window fits,
// plus one window ending at F when the last start leaves events uncovered.
// A match shorter than the window yields one bag covering it.
std::vector<std::pair<std::size_t, std::size_t>> sliding_windows(std::size_t events, std::size_t window,
                                                                 std::size_t stride);

// LSTM -> coordinate-wise max over time -> sigmoid neuron.
class MilModel {
  public:
    MilModel() = default;
    MilModel(std::size_t input_width, std::size_t hidden, std::uint64_t seed);

    std::size_t input_width() const noexcept { return lstm_.input; }
    std::size_t hidden() const noexcept { return lstm_.hidden; }

    nn::ParamSet& params() noexcept { return params_; }
    const nn::ParamSet& params() const noexcept { return params_; }

    // Input normalisation fitted on training features; applied by prepare().
    features::FeatureScaler scaler;
    double threshold = 0.5;
    ScoringConfig scoring;

    RowMatrix prepare(const RowMatrix& raw_features) const { return scaler.transform(raw_features); }

    // Bag score O for rows [start, start + length) of prepared features.
    double bag_score(const RowMatrix& prepared, std::size_t start, std::size_t length) const;
    nn::Var forward(nn::Tape& tape, const RowMatrix& prepared, std::size_t start, std::size_t length) const;

    // Pooled representation z (for inspection and tests).
    std::vector<double> pooled(const RowMatrix& prepared, std::size_t start, std::size_t length) const;

    nlohmann::json metadata() const;
    static MilModel from_metadata(const nlohmann::json& meta);  // parameters left zeroed

  private:
    nn::ParamSet params_;
    nn::LstmParams lstm_;
    nn::ParamId out_w_{}, out_b_{};
};

// Per-event LSE-fused scores over sliding bags of raw features.
std::vector<double> score_events(const MilModel& model, const RowMatrix& raw_features, const ScoringConfig& config);
inline std::vector<double> score_events(const MilModel& model, const RowMatrix& raw_features) {
    return score_events(model, raw_features, model.scoring);
}

struct MilConfig {
    std::size_t hidden = 16;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t patience = 20;
    double overlap_ratio = 0.5;
    nn::AdamConfig adam{};
    ScoringConfig scoring{};
};

struct MilTrainingData {
    std::vector<RowMatrix> train_features;  // raw, one per training match
    std::vector<Bag> bags;                  // Bag::match indexes train_features
    std::vector<const Match*> validation_matches;
    std::vector<RowMatrix> validation_features;  // raw
    std::vector<const std::vector<Action>*> validation_reference;
};

struct MilTrainingReport {
    std::size_t best_epoch = 0;  // 1-based
    std::size_t epochs_run = 0;
    double best_f2 = 0.0;
    std::vector<double> epoch_loss;
    std::vector<double> epoch_f2;
    std::vector<double> epoch_threshold;
};

// Adam + binary cross-entropy on the bags; after each epoch the validation
// F2 at the tuned threshold decides whether the epoch becomes the best one.
// Training stops after `patience` epochs without improvement.
MilModel train_mil(const MilTrainingData& data, const MilConfig& config, std::uint64_t seed,
                   MilTrainingReport* report = nullptr);

// Mean BCE over `bags` recorded on `tape` (gradient checks use this).
nn::Var mil_batch_loss(nn::Tape& tape, const MilModel& model, std::span<const RowMatrix> prepared,
                       std::span<const Bag> bags);

}  // namespace soccersum::stage1
