#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace soccersum {

// The ten evaluation categories every summary action maps onto.
enum class SummaryActionType : std::uint8_t {
    free_kick,
    corner,
    foul,
    shot,
    save,
    var,
    goal,
    end_period,
    start_period,
    other,
};

inline constexpr std::size_t kSummaryActionTypeCount = 10;

std::string_view to_string(SummaryActionType t);
SummaryActionType parse_summary_action_type(std::string_view token);

struct EventTypeId {
    std::uint16_t value = 0;
    friend bool operator==(EventTypeId, EventTypeId) = default;
    friend auto operator<=>(EventTypeId, EventTypeId) = default;
};

// Ordered set of event-type names. Fixed per dataset and persisted with it.
class EventVocabulary {
  public:
    EventVocabulary() = default;
    explicit EventVocabulary(std::vector<std::string> names);

    static EventVocabulary default_vocabulary();

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(EventTypeId id) const { return names_.at(id.value); }

    // Throws VocabularyError for unknown tokens.
    EventTypeId id(std::string_view name) const;
    std::optional<EventTypeId> find(std::string_view name) const;
    bool contains(EventTypeId id) const noexcept { return id.value < names_.size(); }

    // Summary category an event of this type contributes, if any.
    std::optional<SummaryActionType> summary_category(EventTypeId id) const { return category_.at(id.value); }

    friend bool operator==(const EventVocabulary& a, const EventVocabulary& b) { return a.names_ == b.names_; }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint16_t> index_;
    std::vector<std::optional<SummaryActionType>> category_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

inline constexpr double kFieldMax = 100.0;

struct Event {
    std::size_t index = 0;
    double t = 0.0;  // seconds into the match video
    EventTypeId type{};
    int team = 0;  // 0 or 1
    std::int64_t player = 0;
    Point start{};
    Point end{};
    bool outcome = false;
    int qualifier = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Match {
    std::string id;
    std::vector<Event> events;
    // File path, or "synth:<seed>" for procedurally regenerated audio.
    std::optional<std::string> audio;
    // attack_right[team][half]: true when the team attacks towards x = 100.
    std::array<std::array<bool, 2>, 2> attack_right{{{true, false}, {false, true}}};
    std::shared_ptr<const EventVocabulary> vocabulary;

    std::size_t size() const noexcept { return events.size(); }

    // 0 for the first half, 1 afterwards. Halves are delimited by the second
    // "start-period" event when the vocabulary has one.
    int half_of(std::size_t event_index) const;

    friend bool operator==(const Match& a, const Match& b) {
        return a.id == b.id && a.events == b.events && a.audio == b.audio && a.attack_right == b.attack_right &&
               ((a.vocabulary == nullptr) == (b.vocabulary == nullptr)) &&
               (a.vocabulary == nullptr || *a.vocabulary == *b.vocabulary);
    }
};

// Inclusive contiguous event range.
struct Action {
    std::size_t start = 0;
    std::size_t end = 0;
    SummaryActionType type = SummaryActionType::other;
    std::optional<bool> in_summary;

    std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const Action&, const Action&) = default;
};

enum class SummarySource : std::uint8_t { ground_truth, candidate };

struct Summary {
    std::vector<Action> actions;
    double total_duration = 0.0;
    SummarySource source = SummarySource::ground_truth;
};

struct PaddingConfig {
    double pre = 5.0;
    double post = 10.0;
};

}  // namespace soccersum
