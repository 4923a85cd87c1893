#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "soccersum/core/matrix.hpp"

namespace soccersum::features {

// Per-column z-scoring fitted on training rows. Columns with (near) zero
// spread keep unit scale so constant inputs map to 0.
class FeatureScaler {
  public:
    FeatureScaler() = default;
    FeatureScaler(std::vector<double> mean, std::vector<double> scale);

    static FeatureScaler fit(std::span<const RowMatrix> tables);
    static FeatureScaler identity(std::size_t width);

    std::size_t width() const noexcept { return mean_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& scale() const noexcept { return scale_; }

    RowMatrix transform(const RowMatrix& table) const;

    nlohmann::json to_json() const;
    static FeatureScaler from_json(const nlohmann::json& j);

  private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

}  // namespace soccersum::features
