#pragma once

#include <span>
#include <vector>

#include "soccersum/core/matrix.hpp"
#include "soccersum/core/types.hpp"

namespace soccersum::features {

struct FieldConfig {
    Point right_goal{100.0, 50.0};
    Point left_goal{0.0, 50.0};
};

struct GoalGeometry {
    double distance = 0.0;  // Euclidean distance / 100
    double angle = 0.0;     // radians in (-pi, pi]
};

GoalGeometry geometry_to_goal(Point loc, Point goal_center);

// One-hot qualifier encoding: the `width - 1` most frequent training codes get
// their own slot, everything else falls into the final "other" slot.
class QualifierCodebook {
  public:
    explicit QualifierCodebook(std::size_t width = 8, std::vector<int> codes = {});

    // Most frequent codes across `matches` (ties broken by smaller code).
    static QualifierCodebook fit(std::span<const Match> matches, std::size_t width = 8);

    std::size_t width() const noexcept { return width_; }
    const std::vector<int>& codes() const noexcept { return codes_; }
    std::size_t slot(int qualifier) const;

  private:
    std::size_t width_;
    std::vector<int> codes_;
};

// Offsets into a metadata vector.
namespace meta {
inline constexpr std::size_t sx = 0, sy = 1, ex = 2, ey = 3, time_elapsed = 4, start_dist = 5, end_dist = 6,
                             start_angle = 7, end_angle = 8, outcome = 9, type_onehot = 10;
}

inline std::size_t metadata_width(std::size_t vocab_size, std::size_t qualifier_width) {
    return 10 + vocab_size + qualifier_width;
}

// Encodes one event. `prev` is the preceding event of the same match or null.
// Throws VocabularyError when the event type is outside `vocab`.
std::vector<double> encode_event_metadata(const Event& event, const Event* prev, bool attacking_right,
                                          const EventVocabulary& vocab, const QualifierCodebook& qualifiers,
                                          const FieldConfig& field = {});

// One metadata row per event of the match.
RowMatrix encode_match_metadata(const Match& match, const QualifierCodebook& qualifiers,
                                const FieldConfig& field = {});

}  // namespace soccersum::features
