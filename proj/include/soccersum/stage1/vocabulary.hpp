#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "soccersum/core/types.hpp"

namespace soccersum::stage1 {

using TypeSequence = std::vector<std::uint16_t>;

// Distinct event-type sequences of ground-truth summary actions.
class ActionVocabulary {
  public:
    void add(TypeSequence seq);
    bool contains(const TypeSequence& seq) const { return entries_.count(seq) != 0; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t max_length() const noexcept;
    const std::set<TypeSequence>& entries() const noexcept { return entries_; }
    // Distinct entry lengths, ascending.
    std::vector<std::size_t> lengths() const;

  private:
    std::set<TypeSequence> entries_;
};

TypeSequence type_sequence(const Match& match, std::size_t start, std::size_t end_inclusive);

// Harvests every summary action of the given matches. `summaries[i]` belongs
// to `matches[i]`.
ActionVocabulary build_action_vocabulary(std::span<const Match* const> matches,
                                         std::span<const std::vector<Action>* const> summaries);

// Every exact occurrence of a vocabulary entry, as typed actions ordered by
// (start, end). Overlapping occurrences are all reported.
std::vector<Action> find_vocabulary_occurrences(const Match& match, const ActionVocabulary& vocab);

// 1 for events covered by at least one occurrence.
std::vector<std::uint8_t> label_events_by_vocabulary(const Match& match, const ActionVocabulary& vocab);

}  // namespace soccersum::stage1
