#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "soccersum/core/types.hpp"

namespace soccersum::stage1 {

// Contiguous event range [start, start + length) of match `match`.
struct Bag {
    std::size_t match = 0;
    std::size_t start = 0;
    std::size_t length = 0;
    int label = 0;

    friend bool operator==(const Bag&, const Bag&) = default;
};

// Positive bags are the given action spans (`positives[m]` for match m,
// deduplicated by range). Negatives are uniformly drawn spans lying entirely
// outside labelled events, with length uniform in [4, max(4, longest
// positive)], as many as there are positives. Lengths with no admissible span
// are skipped; DataError when fewer admissible spans exist than are needed.
std::vector<Bag> sample_training_bags(std::span<const std::vector<Action>> positives,
                                      std::span<const std::vector<std::uint8_t>> labels, std::uint64_t seed);

inline constexpr std::size_t kMinNegativeBagLength = 4;

}  // namespace soccersum::stage1
