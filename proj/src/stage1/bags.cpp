#include "soccersum/stage1/bags.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"

namespace soccersum::stage1 {

std::vector<Bag> sample_training_bags(std::span<const std::vector<Action>> positives,
                                      std::span<const std::vector<std::uint8_t>> labels, std::uint64_t seed) {
    if (positives.size() != labels.size()) throw std::invalid_argument("sample_training_bags: size mismatch");
    std::vector<Bag> bags;
    std::size_t longest = 0;
    for (std::size_t m = 0; m < positives.size(); ++m) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const Action& a : positives[m]) {
            if (a.end >= labels[m].size()) throw std::out_of_range("positive span outside match");
            if (!seen.emplace(a.start, a.end).second) continue;
            bags.push_back({m, a.start, a.length(), 1});
            longest = std::max(longest, a.length());
        }
    }
    const std::size_t needed = bags.size();
    if (needed == 0) return bags;

    // run[m][i]: number of consecutive unlabelled events starting at i.
    std::vector<std::vector<std::size_t>> run(labels.size());
    for (std::size_t m = 0; m < labels.size(); ++m) {
        const auto& l = labels[m];
        run[m].assign(l.size() + 1, 0);
        for (std::size_t i = l.size(); i-- > 0;) run[m][i] = l[i] ? 0 : run[m][i + 1] + 1;
    }

    const std::size_t max_len = std::max(kMinNegativeBagLength, longest);
    struct Candidates {
        std::size_t length;
        std::vector<std::pair<std::size_t, std::size_t>> spans;  // (match, start)
    };
    std::vector<Candidates> by_length;
    std::size_t available = 0;
    for (std::size_t len = kMinNegativeBagLength; len <= max_len; ++len) {
        Candidates c{len, {}};
        for (std::size_t m = 0; m < run.size(); ++m)
            for (std::size_t i = 0; i < labels[m].size(); ++i)
                if (run[m][i] >= len) c.spans.emplace_back(m, i);
        available += c.spans.size();
        if (!c.spans.empty()) by_length.push_back(std::move(c));
    }
    if (available < needed || by_length.empty()) {
        throw DataError("not enough negative material: need " + std::to_string(needed) + " negative bags, only " +
                        std::to_string(available) + " admissible spans (shortfall " +
                        std::to_string(needed - std::min(needed, available)) + ")");
    }

    Rng rng(derive_seed(seed, {0x626167ULL}));
    for (std::size_t n = 0; n < needed; ++n) {
        const Candidates& c = by_length[rng.below(by_length.size())];
        const auto [m, start] = c.spans[rng.below(c.spans.size())];
        bags.push_back({m, start, c.length, 0});
    }
    return bags;
}

}  // namespace soccersum::stage1
