#include "soccersum/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soccersum/core/errors.hpp"
#include "soccersum/kernels/kernels.hpp"

namespace soccersum::nn {
namespace {

inline double sigmoid_scalar(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr double kProbClamp = 1e-7;

}  // namespace

Tape::Tape(const ParamSet& params) : const_params_(&params), params_(nullptr) {}
Tape::Tape(ParamSet& params) : const_params_(&params), params_(&params) {}

Var Tape::push(Node node) {
    node.grad.assign(node.value.size(), 0.0);
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::input(std::span<const double> values) {
    Node n;
    n.op = Op::input;
    n.value.assign(values.begin(), values.end());
    return push(std::move(n));
}

Var Tape::zeros(std::size_t size) {
    Node n;
    n.op = Op::input;
    n.value.assign(size, 0.0);
    return push(std::move(n));
}

Var Tape::affine(ParamId W, Var x) {
    const Param& w = param(W);
    const auto& xv = value(x);
    if (xv.size() != w.cols) throw ShapeError("affine: '" + w.name + "' expects " + std::to_string(w.cols) + " inputs, got " + std::to_string(xv.size()));
    Node n;
    n.op = Op::affine;
    n.a = x.id;
    n.p0 = W.index;
    n.value.assign(w.rows, 0.0);
    kernels::gemv_acc(w.value.data(), w.rows, w.cols, xv.data(), n.value.data());
    return push(std::move(n));
}

Var Tape::affine(ParamId W, Var x, ParamId b) {
    const Param& w = param(W);
    const Param& bias = param(b);
    if (bias.size() != w.rows) throw ShapeError("affine: bias '" + bias.name + "' size mismatch");
    const auto& xv = value(x);
    if (xv.size() != w.cols) throw ShapeError("affine: '" + w.name + "' expects " + std::to_string(w.cols) + " inputs, got " + std::to_string(xv.size()));
    Node n;
    n.op = Op::affine_bias;
    n.a = x.id;
    n.p0 = W.index;
    n.p1 = b.index;
    n.value = bias.value;
    kernels::gemv_acc(w.value.data(), w.rows, w.cols, xv.data(), n.value.data());
    return push(std::move(n));
}

Var Tape::affine2(ParamId W, Var x, ParamId U, Var h, ParamId b) {
    const Param& w = param(W);
    const Param& u = param(U);
    const Param& bias = param(b);
    const auto& xv = value(x);
    const auto& hv = value(h);
    if (xv.size() != w.cols) throw ShapeError("affine2: '" + w.name + "' expects " + std::to_string(w.cols) + " inputs, got " + std::to_string(xv.size()));
    if (hv.size() != u.cols || u.rows != w.rows || bias.size() != w.rows) throw ShapeError("affine2: recurrent shape mismatch for '" + u.name + "'");
    Node n;
    n.op = Op::affine2;
    n.a = x.id;
    n.b = h.id;
    n.p0 = W.index;
    n.p1 = U.index;
    n.p2 = b.index;
    n.value = bias.value;
    kernels::gemv_acc(w.value.data(), w.rows, w.cols, xv.data(), n.value.data());
    kernels::gemv_acc(u.value.data(), u.rows, u.cols, hv.data(), n.value.data());
    return push(std::move(n));
}

Var Tape::sigmoid(Var x) {
    Node n;
    n.op = Op::sigmoid;
    n.a = x.id;
    n.value = value(x);
    for (double& v : n.value) v = sigmoid_scalar(v);
    return push(std::move(n));
}

Var Tape::tanh(Var x) {
    Node n;
    n.op = Op::tanh;
    n.a = x.id;
    n.value = value(x);
    for (double& v : n.value) v = std::tanh(v);
    return push(std::move(n));
}

Var Tape::lstm_activate(Var pre) {
    const auto& z = value(pre);
    if (z.size() % 4 != 0) throw ShapeError("lstm_activate: size must be a multiple of 4");
    const std::size_t h = z.size() / 4;
    Node n;
    n.op = Op::lstm_activate;
    n.a = pre.id;
    n.value.resize(z.size());
    for (std::size_t i = 0; i < 3 * h; ++i) n.value[i] = sigmoid_scalar(z[i]);
    for (std::size_t i = 3 * h; i < 4 * h; ++i) n.value[i] = std::tanh(z[i]);
    return push(std::move(n));
}

Var Tape::lstm_cell(Var gates, Var cell_prev) {
    const auto& g = value(gates);
    const auto& c = value(cell_prev);
    const std::size_t h = c.size();
    if (g.size() != 4 * h) throw ShapeError("lstm_cell: gate/cell size mismatch");
    Node n;
    n.op = Op::lstm_cell;
    n.a = gates.id;
    n.b = cell_prev.id;
    n.value.resize(h);
    for (std::size_t j = 0; j < h; ++j) n.value[j] = g[h + j] * c[j] + g[j] * g[3 * h + j];
    return push(std::move(n));
}

Var Tape::lstm_hidden(Var gates, Var cell) {
    const auto& g = value(gates);
    const auto& c = value(cell);
    const std::size_t h = c.size();
    if (g.size() != 4 * h) throw ShapeError("lstm_hidden: gate/cell size mismatch");
    Node n;
    n.op = Op::lstm_hidden;
    n.a = gates.id;
    n.b = cell.id;
    n.aux.resize(h);
    n.value.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        n.aux[j] = std::tanh(c[j]);
        n.value[j] = g[2 * h + j] * n.aux[j];
    }
    return push(std::move(n));
}

Var Tape::max_pool(std::span<const Var> vectors) {
    if (vectors.empty()) throw ShapeError("max_pool: empty input");
    const std::size_t width = value(vectors[0]).size();
    Node n;
    n.op = Op::max_pool;
    n.value = value(vectors[0]);
    n.argmax.assign(width, 0);
    for (const Var& v : vectors) n.inputs.push_back(v.id);
    for (std::size_t k = 1; k < vectors.size(); ++k) {
        const auto& vk = value(vectors[k]);
        if (vk.size() != width) throw ShapeError("max_pool: width mismatch");
        for (std::size_t j = 0; j < width; ++j) {
            if (vk[j] > n.value[j]) {
                n.value[j] = vk[j];
                n.argmax[j] = static_cast<std::uint32_t>(k);
            }
        }
    }
    return push(std::move(n));
}

Var Tape::concat_scalars(std::span<const Var> scalars) {
    Node n;
    n.op = Op::concat;
    for (const Var& s : scalars) {
        if (value(s).size() != 1) throw ShapeError("concat_scalars: non-scalar input");
        n.inputs.push_back(s.id);
        n.value.push_back(value(s)[0]);
    }
    return push(std::move(n));
}

Var Tape::softmax(Var x) {
    const auto& z = value(x);
    if (z.empty()) throw ShapeError("softmax: empty input");
    Node n;
    n.op = Op::softmax;
    n.a = x.id;
    const double m = *std::max_element(z.begin(), z.end());
    n.value.resize(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) total += (n.value[i] = std::exp(z[i] - m));
    for (double& v : n.value) v /= total;
    return push(std::move(n));
}

Var Tape::weighted_sum(Var weights, std::span<const Var> vectors) {
    const auto& w = value(weights);
    if (w.size() != vectors.size() || vectors.empty()) throw ShapeError("weighted_sum: weight count mismatch");
    const std::size_t width = value(vectors[0]).size();
    Node n;
    n.op = Op::weighted_sum;
    n.a = weights.id;
    n.value.assign(width, 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto& v = value(vectors[i]);
        if (v.size() != width) throw ShapeError("weighted_sum: width mismatch");
        n.inputs.push_back(vectors[i].id);
        kernels::axpy(w[i], v.data(), n.value.data(), width);
    }
    return push(std::move(n));
}

Var Tape::bce(Var probability, double label) {
    const double p = std::clamp(scalar(probability), kProbClamp, 1.0 - kProbClamp);
    Node n;
    n.op = Op::bce;
    n.a = probability.id;
    n.label = label;
    n.aux = {p};
    n.value = {-(label * std::log(p) + (1.0 - label) * std::log(1.0 - p))};
    return push(std::move(n));
}

Var Tape::mean(std::span<const Var> scalars) {
    if (scalars.empty()) throw ShapeError("mean: empty input");
    Node n;
    n.op = Op::mean;
    double total = 0.0;
    for (const Var& s : scalars) {
        n.inputs.push_back(s.id);
        total += scalar(s);
    }
    n.value = {total / static_cast<double>(scalars.size())};
    return push(std::move(n));
}

void Tape::backward(Var loss) {
    if (params_ == nullptr) throw std::logic_error("backward on an inference-only tape");
    if (value(loss).size() != 1) throw ShapeError("backward: loss must be a scalar");
    for (Node& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
    nodes_[loss.id].grad[0] = 1.0;
    for (std::size_t i = loss.id + 1; i-- > 0;) backward_node(nodes_[i]);
}

void Tape::backward_node(Node& n) {
    const std::vector<double>& g = n.grad;
    if (n.op == Op::input) return;
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) return;

    switch (n.op) {
        case Op::input: break;
        case Op::affine:
        case Op::affine_bias: {
            Param& w = (*params_)[ParamId{n.p0}];
            const auto& x = nodes_[n.a].value;
            kernels::ger_acc(w.grad.data(), w.rows, w.cols, g.data(), x.data());
            kernels::gemv_t_acc(w.value.data(), w.rows, w.cols, g.data(), nodes_[n.a].grad.data());
            if (n.op == Op::affine_bias) kernels::axpy(1.0, g.data(), (*params_)[ParamId{n.p1}].grad.data(), g.size());
            break;
        }
        case Op::affine2: {
            Param& w = (*params_)[ParamId{n.p0}];
            Param& u = (*params_)[ParamId{n.p1}];
            kernels::ger_acc(w.grad.data(), w.rows, w.cols, g.data(), nodes_[n.a].value.data());
            kernels::gemv_t_acc(w.value.data(), w.rows, w.cols, g.data(), nodes_[n.a].grad.data());
            kernels::ger_acc(u.grad.data(), u.rows, u.cols, g.data(), nodes_[n.b].value.data());
            kernels::gemv_t_acc(u.value.data(), u.rows, u.cols, g.data(), nodes_[n.b].grad.data());
            kernels::axpy(1.0, g.data(), (*params_)[ParamId{n.p2}].grad.data(), g.size());
            break;
        }
        case Op::sigmoid: {
            auto& dx = nodes_[n.a].grad;
            for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
            break;
        }
        case Op::tanh: {
            auto& dx = nodes_[n.a].grad;
            for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
            break;
        }
        case Op::lstm_activate: {
            auto& dz = nodes_[n.a].grad;
            const std::size_t h = g.size() / 4;
            for (std::size_t i = 0; i < 3 * h; ++i) dz[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
            for (std::size_t i = 3 * h; i < 4 * h; ++i) dz[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
            break;
        }
        case Op::lstm_cell: {
            const auto& gates = nodes_[n.a].value;
            const auto& c_prev = nodes_[n.b].value;
            auto& d_gates = nodes_[n.a].grad;
            auto& d_cprev = nodes_[n.b].grad;
            const std::size_t h = g.size();
            for (std::size_t j = 0; j < h; ++j) {
                d_gates[j] += g[j] * gates[3 * h + j];
                d_gates[h + j] += g[j] * c_prev[j];
                d_gates[3 * h + j] += g[j] * gates[j];
                d_cprev[j] += g[j] * gates[h + j];
            }
            break;
        }
        case Op::lstm_hidden: {
            const auto& gates = nodes_[n.a].value;
            auto& d_gates = nodes_[n.a].grad;
            auto& d_cell = nodes_[n.b].grad;
            const std::size_t h = g.size();
            for (std::size_t j = 0; j < h; ++j) {
                d_gates[2 * h + j] += g[j] * n.aux[j];
                d_cell[j] += g[j] * gates[2 * h + j] * (1.0 - n.aux[j] * n.aux[j]);
            }
            break;
        }
        case Op::max_pool: {
            for (std::size_t j = 0; j < g.size(); ++j) nodes_[n.inputs[n.argmax[j]]].grad[j] += g[j];
            break;
        }
        case Op::concat: {
            for (std::size_t i = 0; i < n.inputs.size(); ++i) nodes_[n.inputs[i]].grad[0] += g[i];
            break;
        }
        case Op::softmax: {
            double dot = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * n.value[i];
            auto& dz = nodes_[n.a].grad;
            for (std::size_t i = 0; i < g.size(); ++i) dz[i] += n.value[i] * (g[i] - dot);
            break;
        }
        case Op::weighted_sum: {
            const auto& w = nodes_[n.a].value;
            auto& dw = nodes_[n.a].grad;
            for (std::size_t i = 0; i < n.inputs.size(); ++i) {
                Node& v = nodes_[n.inputs[i]];
                dw[i] += kernels::dot(g.data(), v.value.data(), g.size());
                kernels::axpy(w[i], g.data(), v.grad.data(), g.size());
            }
            break;
        }
        case Op::bce: {
            const double raw = nodes_[n.a].value[0];
            // Gradient is zero where the clamp is active.
            if (raw > kProbClamp && raw < 1.0 - kProbClamp) {
                const double p = n.aux[0];
                nodes_[n.a].grad[0] += g[0] * (-(n.label / p) + (1.0 - n.label) / (1.0 - p));
            }
            break;
        }
        case Op::mean: {
            const double share = g[0] / static_cast<double>(n.inputs.size());
            for (std::uint32_t id : n.inputs) nodes_[id].grad[0] += share;
            break;
        }
    }
}

}  // namespace soccersum::nn
