#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "soccersum/nn/param_set.hpp"

namespace soccersum::nn {

struct Var {
    std::uint32_t id = 0;
};

// Reverse-mode recorder for the fixed recurrent architectures. Every op
// appends one node holding its forward value; backward() walks the nodes in
// reverse, accumulating into node gradients and into the ParamSet's `grad`
// buffers. Parameters never touched by the recorded graph keep a zero
// gradient.
class Tape {
  public:
    // Inference-only tape; backward() throws.
    explicit Tape(const ParamSet& params);
    // Training tape; backward() accumulates into params' gradients.
    explicit Tape(ParamSet& params);

    Var input(std::span<const double> values);
    Var zeros(std::size_t n);

    // W x (+ b). W is rows x cols, x has cols entries, b is rows x 1.
    Var affine(ParamId W, Var x);
    Var affine(ParamId W, Var x, ParamId b);
    // W x + U h + b, the pre-activation of a recurrent cell.
    Var affine2(ParamId W, Var x, ParamId U, Var h, ParamId b);

    Var sigmoid(Var x);
    Var tanh(Var x);

    // LSTM pieces. Gate blocks are ordered [input, forget, output, candidate].
    Var lstm_activate(Var preactivation);       // sigma on the first 3H, tanh on the last H
    Var lstm_cell(Var gates, Var cell_prev);    // f * c_prev + i * g
    Var lstm_hidden(Var gates, Var cell);       // o * tanh(c)

    // Coordinate-wise maximum; ties send the gradient to the lowest index.
    Var max_pool(std::span<const Var> vectors);
    // Scalars (size-1 nodes) gathered into one vector.
    Var concat_scalars(std::span<const Var> scalars);
    Var softmax(Var x);
    // sum_i w[i] * vectors[i]; w must have vectors.size() entries.
    Var weighted_sum(Var weights, std::span<const Var> vectors);
    // Binary cross-entropy of a probability (clamped to [1e-7, 1 - 1e-7]).
    Var bce(Var probability, double label);
    // Mean of scalar nodes.
    Var mean(std::span<const Var> scalars);

    const std::vector<double>& value(Var v) const { return nodes_[v.id].value; }
    double scalar(Var v) const { return nodes_[v.id].value.at(0); }
    const std::vector<double>& grad(Var v) const { return nodes_[v.id].grad; }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be a scalar.
    void backward(Var loss);

  private:
    enum class Op : std::uint8_t {
        input, affine, affine_bias, affine2, sigmoid, tanh, lstm_activate, lstm_cell, lstm_hidden,
        max_pool, concat, softmax, weighted_sum, bce, mean,
    };

    struct Node {
        Op op = Op::input;
        std::uint32_t a = 0, b = 0;
        std::uint32_t p0 = 0, p1 = 0, p2 = 0;
        double label = 0.0;
        std::vector<std::uint32_t> inputs;  // variadic ops
        std::vector<std::uint32_t> argmax;  // max_pool winners
        std::vector<double> aux;            // cached intermediates
        std::vector<double> value;
        std::vector<double> grad;
    };

    Var push(Node node);
    const Param& param(ParamId id) const { return (*const_params_)[id]; }
    void backward_node(Node& n);

    const ParamSet* const_params_;
    ParamSet* params_;
    std::vector<Node> nodes_;
};

}  // namespace soccersum::nn
