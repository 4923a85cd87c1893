#include "soccersum/nn/adam.hpp"

#include <cmath>

#include "soccersum/core/errors.hpp"

namespace soccersum::nn {

AdamState::AdamState(const ParamSet& params, AdamConfig config) : config_(config) {
    for (const Param& p : params) {
        m_.emplace_back(p.size(), 0.0);
        v_.emplace_back(p.size(), 0.0);
    }
}

void AdamState::step(ParamSet& params) {
    if (params.size() != m_.size()) throw ShapeError("adam: parameter set changed shape");
    double norm2 = 0.0;
    for (const Param& p : params) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!std::isfinite(p.grad[k])) {
                throw TrainingError("non-finite gradient in '" + p.name + "'[" + std::to_string(k) + "] at step " +
                                    std::to_string(t_ + 1));
            }
            norm2 += p.grad[k] * p.grad[k];
        }
    }
    double scale = 1.0;
    if (config_.clip_norm > 0.0 && norm2 > config_.clip_norm * config_.clip_norm) {
        scale = config_.clip_norm / std::sqrt(norm2);
    }

    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    std::size_t i = 0;
    for (Param& p : params) {
        auto& m = m_[i];
        auto& v = v_[i];
        ++i;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double g = p.grad[k] * scale;
            m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
            v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
            p.value[k] -= config_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
        }
    }
}

}  // namespace soccersum::nn
