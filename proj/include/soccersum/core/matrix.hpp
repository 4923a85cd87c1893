#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace soccersum {

// Dense row-major matrix of doubles; one row per event in feature tables.
class RowMatrix {
  public:
    RowMatrix() = default;
    RowMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw std::invalid_argument("row width mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    // Rows [first, first + count) as a new matrix.
    RowMatrix slice_rows(std::size_t first, std::size_t count) const {
        if (first + count > rows_) throw std::out_of_range("row slice out of range");
        RowMatrix out(count, cols_);
        std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_), out.data_.begin());
        return out;
    }

    friend bool operator==(const RowMatrix&, const RowMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace soccersum
