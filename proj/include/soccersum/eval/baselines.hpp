#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "soccersum/core/types.hpp"

namespace soccersum::eval {

enum class SoccerBaseline { random, goals, shots_on_target };

std::string_view to_string(SoccerBaseline b);

// Proposals the baseline predicts as summary actions, in input order.
//   random:          uniform(0,1) draw per proposal, kept when >= 0.5
//   goals:           goal-type proposals
//   shots_on_target: goal, save and shot proposals
std::vector<Action> soccer_baseline(SoccerBaseline mode, std::span<const Action> proposals, std::uint64_t seed);

}  // namespace soccersum::eval
