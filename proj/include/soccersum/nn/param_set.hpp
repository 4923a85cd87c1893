#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace soccersum::nn {

struct ParamId {
    std::uint32_t index = 0;
    friend bool operator==(ParamId, ParamId) = default;
};

struct Param {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t fan_in = 1;
    std::vector<double> value;
    std::vector<double> grad;

    std::size_t size() const noexcept { return rows * cols; }
};

// Named trainable tensors in insertion order. Shapes are fixed once added.
class ParamSet {
  public:
    ParamId add(std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in);

    Param& operator[](ParamId id) { return params_.at(id.index); }
    const Param& operator[](ParamId id) const { return params_.at(id.index); }
    ParamId id(const std::string& name) const;  // throws std::out_of_range

    std::size_t size() const noexcept { return params_.size(); }
    std::size_t scalar_count() const noexcept;
    auto begin() noexcept { return params_.begin(); }
    auto end() noexcept { return params_.end(); }
    auto begin() const noexcept { return params_.begin(); }
    auto end() const noexcept { return params_.end(); }

    // uniform(-a, a) with a = 1/sqrt(fan_in), drawn in parameter order.
    void init_uniform(std::uint64_t seed);
    void zero_grad();
    bool all_finite() const;

    // Concatenation of all values / gradients in parameter order.
    std::vector<double> flat_values() const;
    std::vector<double> flat_grads() const;
    void set_flat_values(std::span<const double> values);

    // Copies values from `other`, which must have identical names and shapes.
    void assign_values(const ParamSet& other);

  private:
    std::vector<Param> params_;
};

}  // namespace soccersum::nn
