#include "soccersum/eval/kfold.hpp"

#include <algorithm>
#include <numeric>
#include <span>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"

namespace soccersum::eval {

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 3) throw DataError("k-fold needs k >= 3 for disjoint train/validation/test roles");
    if (n < k) throw DataError("k-fold needs at least k = " + std::to_string(k) + " matches, got " + std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {0x6b666f6c64ULL}));
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<std::vector<std::size_t>> shards(k);
    for (std::size_t s = 0; s < k; ++s) {
        shards[s].assign(order.begin() + static_cast<std::ptrdiff_t>(s * n / k),
                         order.begin() + static_cast<std::ptrdiff_t>((s + 1) * n / k));
    }
    std::vector<Fold> folds(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t v = (i + 1) % k;
        for (std::size_t s = 0; s < k; ++s) {
            auto& dst = s == i ? folds[i].test : s == v ? folds[i].validation : folds[i].train;
            dst.insert(dst.end(), shards[s].begin(), shards[s].end());
        }
        std::sort(folds[i].train.begin(), folds[i].train.end());
        std::sort(folds[i].validation.begin(), folds[i].validation.end());
        std::sort(folds[i].test.begin(), folds[i].test.end());
    }
    return folds;
}

}  // namespace soccersum::eval
