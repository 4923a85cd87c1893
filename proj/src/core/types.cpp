#include "soccersum/core/types.hpp"

#include <stdexcept>

#include "soccersum/core/errors.hpp"

namespace soccersum {
namespace {

constexpr std::array<std::string_view, kSummaryActionTypeCount> kSummaryNames{
    "free-kick", "corner", "foul", "shot", "save", "var", "goal", "end-period", "start-period", "other",
};

std::optional<SummaryActionType> category_for(std::string_view name) {
    if (name == "goal-shot") return SummaryActionType::goal;
    if (name == "var") return SummaryActionType::var;
    if (name == "save") return SummaryActionType::save;
    if (name == "shot") return SummaryActionType::shot;
    if (name == "free-kick") return SummaryActionType::free_kick;
    if (name == "corner-shot") return SummaryActionType::corner;
    if (name == "foul") return SummaryActionType::foul;
    if (name == "start-period") return SummaryActionType::start_period;
    if (name == "end-period") return SummaryActionType::end_period;
    return std::nullopt;
}

}  // namespace

std::string_view to_string(SummaryActionType t) { return kSummaryNames.at(static_cast<std::size_t>(t)); }

SummaryActionType parse_summary_action_type(std::string_view token) {
    for (std::size_t i = 0; i < kSummaryNames.size(); ++i) {
        if (kSummaryNames[i] == token) return static_cast<SummaryActionType>(i);
    }
    throw ParseError("unknown summary action type '" + std::string(token) + "'");
}

EventVocabulary::EventVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > 0xFFFF) throw std::invalid_argument("event vocabulary too large");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        auto [it, inserted] = index_.emplace(names_[i], static_cast<std::uint16_t>(i));
        if (!inserted) throw std::invalid_argument("duplicate event type '" + names_[i] + "'");
        category_.push_back(category_for(names_[i]));
    }
}

EventVocabulary EventVocabulary::default_vocabulary() {
    return EventVocabulary({"pass", "tackle", "out", "interception", "shot", "goal-shot", "corner-shot", "save",
                            "foul", "card", "free-kick", "kick-off", "substitution", "clearance", "start-period",
                            "end-period", "var", "other"});
}

EventTypeId EventVocabulary::id(std::string_view name) const {
    if (auto found = find(name)) return *found;
    throw VocabularyError(std::string(name));
}

std::optional<EventTypeId> EventVocabulary::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return EventTypeId{it->second};
}

int Match::half_of(std::size_t event_index) const {
    if (vocabulary == nullptr) return 0;
    const auto start = vocabulary->find("start-period");
    if (!start) return 0;
    int seen = 0;
    for (std::size_t i = 0; i <= event_index && i < events.size(); ++i) {
        if (events[i].type == *start) ++seen;
    }
    return seen >= 2 ? 1 : 0;
}

}  // namespace soccersum
