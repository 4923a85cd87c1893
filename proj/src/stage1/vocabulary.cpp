#include "soccersum/stage1/vocabulary.hpp"

#include <algorithm>

#include "soccersum/core/match.hpp"

namespace soccersum::stage1 {

void ActionVocabulary::add(TypeSequence seq) {
    if (!seq.empty()) entries_.insert(std::move(seq));
}

std::size_t ActionVocabulary::max_length() const noexcept {
    std::size_t m = 0;
    for (const auto& e : entries_) m = std::max(m, e.size());
    return m;
}

std::vector<std::size_t> ActionVocabulary::lengths() const {
    std::set<std::size_t> s;
    for (const auto& e : entries_) s.insert(e.size());
    return {s.begin(), s.end()};
}

TypeSequence type_sequence(const Match& match, std::size_t start, std::size_t end_inclusive) {
    if (end_inclusive < start || end_inclusive >= match.events.size()) throw std::out_of_range("type_sequence: bad range");
    TypeSequence seq;
    seq.reserve(end_inclusive - start + 1);
    for (std::size_t i = start; i <= end_inclusive; ++i) seq.push_back(match.events[i].type.value);
    return seq;
}

ActionVocabulary build_action_vocabulary(std::span<const Match* const> matches,
                                         std::span<const std::vector<Action>* const> summaries) {
    if (matches.size() != summaries.size()) throw std::invalid_argument("build_action_vocabulary: size mismatch");
    ActionVocabulary vocab;
    for (std::size_t m = 0; m < matches.size(); ++m)
        for (const Action& a : *summaries[m]) vocab.add(type_sequence(*matches[m], a.start, a.end));
    return vocab;
}

std::vector<Action> find_vocabulary_occurrences(const Match& match, const ActionVocabulary& vocab) {
    std::vector<Action> out;
    const auto lengths = vocab.lengths();
    const std::size_t F = match.events.size();
    TypeSequence window;
    for (std::size_t s = 0; s < F; ++s) {
        for (std::size_t len : lengths) {
            if (s + len > F) break;
            window.clear();
            for (std::size_t i = s; i < s + len; ++i) window.push_back(match.events[i].type.value);
            if (vocab.contains(window)) {
                Action a;
                a.start = s;
                a.end = s + len - 1;
                a.type = action_type(a, match);
                out.push_back(a);
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> label_events_by_vocabulary(const Match& match, const ActionVocabulary& vocab) {
    std::vector<std::uint8_t> labels(match.events.size(), 0);
    for (const Action& a : find_vocabulary_occurrences(match, vocab))
        std::fill(labels.begin() + static_cast<std::ptrdiff_t>(a.start),
                  labels.begin() + static_cast<std::ptrdiff_t>(a.end + 1), std::uint8_t{1});
    return labels;
}

}  // namespace soccersum::stage1
