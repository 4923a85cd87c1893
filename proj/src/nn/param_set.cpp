#include "soccersum/nn/param_set.hpp"

#include <cmath>
#include <stdexcept>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"

namespace soccersum::nn {

ParamId ParamSet::add(std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in) {
    for (const Param& p : params_) {
        if (p.name == name) throw std::invalid_argument("duplicate parameter '" + name + "'");
    }
    Param p;
    p.name = std::move(name);
    p.rows = rows;
    p.cols = cols;
    p.fan_in = fan_in == 0 ? 1 : fan_in;
    p.value.assign(rows * cols, 0.0);
    p.grad.assign(rows * cols, 0.0);
    params_.push_back(std::move(p));
    return ParamId{static_cast<std::uint32_t>(params_.size() - 1)};
}

ParamId ParamSet::id(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name == name) return ParamId{static_cast<std::uint32_t>(i)};
    }
    throw std::out_of_range("no parameter named '" + name + "'");
}

std::size_t ParamSet::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const Param& p : params_) n += p.size();
    return n;
}

void ParamSet::init_uniform(std::uint64_t seed) {
    Rng rng(seed);
    for (Param& p : params_) {
        const double a = 1.0 / std::sqrt(static_cast<double>(p.fan_in));
        for (double& v : p.value) v = rng.uniform(-a, a);
    }
}

void ParamSet::zero_grad() {
    for (Param& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

bool ParamSet::all_finite() const {
    for (const Param& p : params_)
        for (double v : p.value)
            if (!std::isfinite(v)) return false;
    return true;
}

std::vector<double> ParamSet::flat_values() const {
    std::vector<double> out;
    out.reserve(scalar_count());
    for (const Param& p : params_) out.insert(out.end(), p.value.begin(), p.value.end());
    return out;
}

std::vector<double> ParamSet::flat_grads() const {
    std::vector<double> out;
    out.reserve(scalar_count());
    for (const Param& p : params_) out.insert(out.end(), p.grad.begin(), p.grad.end());
    return out;
}

void ParamSet::set_flat_values(std::span<const double> values) {
    if (values.size() != scalar_count()) throw ShapeError("flat parameter vector has wrong length");
    std::size_t off = 0;
    for (Param& p : params_) {
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(off),
                  values.begin() + static_cast<std::ptrdiff_t>(off + p.size()), p.value.begin());
        off += p.size();
    }
}

void ParamSet::assign_values(const ParamSet& other) {
    if (other.params_.size() != params_.size()) throw ShapeError("parameter sets differ in size");
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const Param& src = other.params_[i];
        Param& dst = params_[i];
        if (src.name != dst.name || src.rows != dst.rows || src.cols != dst.cols) {
            throw ShapeError("parameter '" + src.name + "' does not match '" + dst.name + "'");
        }
        dst.value = src.value;
    }
}

}  // namespace soccersum::nn
