#pragma once

#include <cstdint>
#include <vector>

namespace soccersum::eval {

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

// Seeded shuffle of [0, n) cut into k near-equal shards; fold i tests on
// shard i, validates on shard (i + 1) mod k and trains on the rest. Index
// lists are sorted. Throws DataError when n < k or k < 3.
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace soccersum::eval
