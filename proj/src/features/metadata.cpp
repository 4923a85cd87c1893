#include "soccersum/features/metadata.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/match.hpp"

namespace soccersum::features {

GoalGeometry geometry_to_goal(Point loc, Point goal_center) {
    const double lateral = goal_center.y - loc.y;
    const double longitudinal = goal_center.x - loc.x;
    GoalGeometry g;
    g.distance = std::hypot(lateral, longitudinal) / kFieldMax;
    if (lateral == 0.0 && longitudinal == 0.0) return g;
    // +0.0 folds a negative zero so a point straight behind maps to +pi.
    g.angle = std::atan2(lateral + 0.0, longitudinal);
    return g;
}

QualifierCodebook::QualifierCodebook(std::size_t width, std::vector<int> codes) : width_(width), codes_(std::move(codes)) {
    if (width_ == 0) throw std::invalid_argument("qualifier width must be >= 1");
    if (codes_.size() > width_ - 1) throw std::invalid_argument("too many qualifier codes for width");
}

QualifierCodebook QualifierCodebook::fit(std::span<const Match> matches, std::size_t width) {
    std::map<int, std::size_t> freq;
    for (const Match& m : matches)
        for (const Event& e : m.events) ++freq[e.qualifier];
    std::vector<std::pair<int, std::size_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<int> codes;
    for (std::size_t i = 0; i < ranked.size() && codes.size() + 1 < width; ++i) codes.push_back(ranked[i].first);
    return QualifierCodebook(width, std::move(codes));
}

std::size_t QualifierCodebook::slot(int qualifier) const {
    for (std::size_t i = 0; i < codes_.size(); ++i) {
        if (codes_[i] == qualifier) return i;
    }
    return width_ - 1;
}

std::vector<double> encode_event_metadata(const Event& event, const Event* prev, bool attacking_right,
                                          const EventVocabulary& vocab, const QualifierCodebook& qualifiers,
                                          const FieldConfig& field) {
    if (!vocab.contains(event.type)) throw VocabularyError("#" + std::to_string(event.type.value));
    std::vector<double> v(metadata_width(vocab.size(), qualifiers.width()), 0.0);
    v[meta::sx] = event.start.x / kFieldMax;
    v[meta::sy] = event.start.y / kFieldMax;
    v[meta::ex] = event.end.x / kFieldMax;
    v[meta::ey] = event.end.y / kFieldMax;
    v[meta::time_elapsed] = prev ? event.t - prev->t : 0.0;
    const Point goal = attacking_right ? field.right_goal : field.left_goal;
    const GoalGeometry gs = geometry_to_goal(event.start, goal);
    const GoalGeometry ge = geometry_to_goal(event.end, goal);
    v[meta::start_dist] = gs.distance;
    v[meta::end_dist] = ge.distance;
    v[meta::start_angle] = gs.angle;
    v[meta::end_angle] = ge.angle;
    v[meta::outcome] = event.outcome ? 1.0 : 0.0;
    v[meta::type_onehot + event.type.value] = 1.0;
    v[meta::type_onehot + vocab.size() + qualifiers.slot(event.qualifier)] = 1.0;
    return v;
}

RowMatrix encode_match_metadata(const Match& match, const QualifierCodebook& qualifiers, const FieldConfig& field) {
    const auto halves = event_halves(match);
    RowMatrix out(0, metadata_width(match.vocabulary->size(), qualifiers.width()));
    for (std::size_t i = 0; i < match.events.size(); ++i) {
        const Event& e = match.events[i];
        const bool right = match.attack_right[e.team & 1][halves[i]];
        out.append_row(encode_event_metadata(e, i > 0 ? &match.events[i - 1] : nullptr, right, *match.vocabulary,
                                             qualifiers, field));
    }
    return out;
}

}  // namespace soccersum::features
