#pragma once

#include <span>
#include <string>
#include <vector>

#include "soccersum/core/matrix.hpp"
#include "soccersum/nn/param_set.hpp"
#include "soccersum/nn/tape.hpp"

namespace soccersum::nn {

// Single-layer LSTM with zero initial state. Gate rows are stacked as
// [input, forget, output, candidate], each `hidden` rows tall.
struct LstmParams {
    ParamId W;  // 4H x I
    ParamId U;  // 4H x H
    ParamId b;  // 4H x 1
    std::size_t input = 0;
    std::size_t hidden = 0;
};

LstmParams add_lstm(ParamSet& params, const std::string& prefix, std::size_t input, std::size_t hidden);
LstmParams find_lstm(const ParamSet& params, const std::string& prefix);

// Recorded forward pass; returns h_1..h_K.
std::vector<Var> lstm_forward(Tape& tape, const LstmParams& lstm, std::span<const Var> inputs);

// Plain forward pass over the rows of `inputs`; returns one hidden row per step.
RowMatrix lstm_forward(const ParamSet& params, const LstmParams& lstm, const RowMatrix& inputs);

}  // namespace soccersum::nn
