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

namespace soccersum::stage2 {

struct HmaShape {
    std::size_t metadata_width = 0;
    std::size_t audio_width = 21;
    std::size_t modality_hidden = 32;
    std::size_t fusion_hidden = 16;
};

// Attention weights of one forward pass.
struct HmaTrace {
    double score = 0.0;
    std::vector<double> lambda_metadata;  // per event
    std::vector<double> lambda_audio;     // per event
    std::vector<double> beta;             // per event
};

// Per-modality LSTMs, shared modality attention (tanh(W h + b), softmax over
// the two modalities), fusion LSTM over the weighted sum, event attention
// softmax_i(u . tanh(h^c_i)), attention-pooled representation, sigmoid.
class HmaModel {
  public:
    HmaModel() = default;
    HmaModel(const HmaShape& shape, std::uint64_t seed);

    const HmaShape& shape() const noexcept { return shape_; }
    nn::ParamSet& params() noexcept { return params_; }
    const nn::ParamSet& params() const noexcept { return params_; }

    features::FeatureScaler metadata_scaler;
    features::FeatureScaler audio_scaler;

    // Records the forward pass over prepared (scaled) proposal rows.
    nn::Var forward(nn::Tape& tape, const RowMatrix& metadata, const RowMatrix& audio, HmaTrace* trace = nullptr) const;

    // Inference on raw rows (scaling applied here).
    HmaTrace run(const RowMatrix& raw_metadata, const RowMatrix& raw_audio) const;
    double score(const RowMatrix& raw_metadata, const RowMatrix& raw_audio) const { return run(raw_metadata, raw_audio).score; }

    nlohmann::json metadata() const;
    static HmaModel from_metadata(const nlohmann::json& meta);

  private:
    HmaShape shape_;
    nn::ParamSet params_;
    nn::LstmParams meta_lstm_, audio_lstm_, fusion_lstm_;
    nn::ParamId attn_w_{}, attn_b_{}, event_u_{}, out_w_{}, out_b_{};
};

// One labelled proposal: raw feature rows of its events.
struct HmaExample {
    RowMatrix metadata;
    RowMatrix audio;
    int label = 0;
};

struct HmaConfig {
    HmaShape shape{};
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t patience = 20;
    double decision_threshold = 0.5;
    nn::AdamConfig adam{};
};

struct HmaTrainingReport {
    std::size_t best_epoch = 0;
    std::size_t epochs_run = 0;
    double best_f1 = 0.0;
    std::vector<double> epoch_loss;
    std::vector<double> epoch_f1;
};

// Adam + BCE; the epoch with the best validation F1 (proposal classified
// positive at score >= decision_threshold) is returned. DataError when the
// training set has a single class.
HmaModel train_hma(std::span<const HmaExample> train, std::span<const HmaExample> validation, const HmaConfig& config,
                   std::uint64_t seed, HmaTrainingReport* report = nullptr);

// Mean BCE over prepared examples (gradient checks use this).
nn::Var hma_batch_loss(nn::Tape& tape, const HmaModel& model, std::span<const HmaExample> prepared);

// theta_p per proposal, in order.
std::vector<double> score_proposals(const HmaModel& model, std::span<const HmaExample> proposals);

}  // namespace soccersum::stage2
