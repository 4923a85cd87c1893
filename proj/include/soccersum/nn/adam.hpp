#pragma once

#include <cstdint>
#include <vector>

#include "soccersum/nn/param_set.hpp"

namespace soccersum::nn {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 0.0;  // global L2 gradient clip; 0 disables
};

// Bias-corrected Adam. Moments are laid out like the ParamSet it was built for.
class AdamState {
  public:
    AdamState(const ParamSet& params, AdamConfig config = {});

    // Applies one update from the gradients currently held in `params`.
    // Throws TrainingError, leaving parameters untouched, when a gradient is
    // not finite.
    void step(ParamSet& params);

    std::uint64_t steps() const noexcept { return t_; }
    const AdamConfig& config() const noexcept { return config_; }

  private:
    AdamConfig config_;
    std::uint64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace soccersum::nn
