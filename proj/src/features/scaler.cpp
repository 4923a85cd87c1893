#include "soccersum/features/scaler.hpp"

#include <cmath>

#include "soccersum/core/errors.hpp"

namespace soccersum::features {

FeatureScaler::FeatureScaler(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
    if (mean_.size() != scale_.size()) throw ShapeError("scaler: mean/scale width mismatch");
}

FeatureScaler FeatureScaler::fit(std::span<const RowMatrix> tables) {
    std::size_t width = 0;
    std::size_t rows = 0;
    for (const RowMatrix& t : tables) {
        if (t.rows() == 0) continue;
        if (width == 0) width = t.cols();
        if (t.cols() != width) throw ShapeError("scaler: tables disagree on width");
        rows += t.rows();
    }
    if (rows == 0) throw DataError("scaler: no rows to fit");
    std::vector<double> mean(width, 0.0), var(width, 0.0);
    for (const RowMatrix& t : tables)
        for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < width; ++c) mean[c] += t(r, c);
    for (double& m : mean) m /= static_cast<double>(rows);
    for (const RowMatrix& t : tables)
        for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < width; ++c) {
                const double d = t(r, c) - mean[c];
                var[c] += d * d;
            }
    std::vector<double> scale(width);
    for (std::size_t c = 0; c < width; ++c) {
        const double sd = std::sqrt(var[c] / static_cast<double>(rows));
        scale[c] = sd > 1e-12 ? sd : 1.0;
    }
    return FeatureScaler(std::move(mean), std::move(scale));
}

FeatureScaler FeatureScaler::identity(std::size_t width) {
    return FeatureScaler(std::vector<double>(width, 0.0), std::vector<double>(width, 1.0));
}

RowMatrix FeatureScaler::transform(const RowMatrix& table) const {
    if (table.rows() > 0 && table.cols() != width()) {
        throw ShapeError("scaler: expected width " + std::to_string(width()) + ", got " + std::to_string(table.cols()));
    }
    RowMatrix out = table;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = (out(r, c) - mean_[c]) / scale_[c];
    return out;
}

nlohmann::json FeatureScaler::to_json() const { return {{"mean", mean_}, {"scale", scale_}}; }

FeatureScaler FeatureScaler::from_json(const nlohmann::json& j) {
    return FeatureScaler(j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>());
}

}  // namespace soccersum::features
