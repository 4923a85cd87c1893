#include "soccersum/nn/lstm.hpp"

#include <cmath>

#include "soccersum/core/errors.hpp"
#include "soccersum/kernels/kernels.hpp"

namespace soccersum::nn {

LstmParams add_lstm(ParamSet& params, const std::string& prefix, std::size_t input, std::size_t hidden) {
    LstmParams p;
    p.input = input;
    p.hidden = hidden;
    p.W = params.add(prefix + ".W", 4 * hidden, input, input);
    p.U = params.add(prefix + ".U", 4 * hidden, hidden, hidden);
    p.b = params.add(prefix + ".b", 4 * hidden, 1, hidden);
    return p;
}

LstmParams find_lstm(const ParamSet& params, const std::string& prefix) {
    LstmParams p;
    p.W = params.id(prefix + ".W");
    p.U = params.id(prefix + ".U");
    p.b = params.id(prefix + ".b");
    p.input = params[p.W].cols;
    p.hidden = params[p.U].cols;
    return p;
}

std::vector<Var> lstm_forward(Tape& tape, const LstmParams& lstm, std::span<const Var> inputs) {
    if (inputs.empty()) throw ShapeError("lstm_forward: empty sequence");
    std::vector<Var> out;
    out.reserve(inputs.size());
    Var h = tape.zeros(lstm.hidden);
    Var c = tape.zeros(lstm.hidden);
    for (const Var& x : inputs) {
        Var gates = tape.lstm_activate(tape.affine2(lstm.W, x, lstm.U, h, lstm.b));
        c = tape.lstm_cell(gates, c);
        h = tape.lstm_hidden(gates, c);
        out.push_back(h);
    }
    return out;
}

namespace {
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}
}  // namespace

RowMatrix lstm_forward(const ParamSet& params, const LstmParams& lstm, const RowMatrix& inputs) {
    if (inputs.rows() == 0) throw ShapeError("lstm_forward: empty sequence");
    if (inputs.cols() != lstm.input) {
        throw ShapeError("lstm_forward: expected input width " + std::to_string(lstm.input) + ", got " +
                         std::to_string(inputs.cols()));
    }
    const std::size_t H = lstm.hidden;
    const Param& W = params[lstm.W];
    const Param& U = params[lstm.U];
    const Param& b = params[lstm.b];
    RowMatrix out(inputs.rows(), H);
    std::vector<double> h(H, 0.0), c(H, 0.0), z(4 * H);
    for (std::size_t t = 0; t < inputs.rows(); ++t) {
        z = b.value;
        kernels::gemv_acc(W.value.data(), W.rows, W.cols, inputs.row(t).data(), z.data());
        kernels::gemv_acc(U.value.data(), U.rows, U.cols, h.data(), z.data());
        for (std::size_t j = 0; j < H; ++j) {
            const double i = sigmoid(z[j]);
            const double f = sigmoid(z[H + j]);
            const double o = sigmoid(z[2 * H + j]);
            const double g = std::tanh(z[3 * H + j]);
            c[j] = f * c[j] + i * g;
            h[j] = o * std::tanh(c[j]);
        }
        std::copy(h.begin(), h.end(), out.row(t).begin());
    }
    return out;
}

}  // namespace soccersum::nn
