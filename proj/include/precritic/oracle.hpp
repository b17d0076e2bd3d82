#pragma once

#include "precritic/grammar.hpp"
#include "precritic/world.hpp"

namespace precritic {

// Exact critic from the BFS oracle: score 1 iff the action is optimal,
// suggestion = smallest optimal action, thinking = (current screen, screen
// after the action, score). Throws ValidationError if the goal is unreachable.
ParsedOutput oracle_critic(const World& world, const EnvState& state, const Action& action);

// Screen the action would lead to (unchanged for Done and unavailable actions).
ScreenId predicted_screen(const World& world, const EnvState& state, const Action& action);

// Deterministic stand-in for an LLM similarity judge: identical actions, or
// both optimal at this state.
bool similar(const World& world, const EnvState& state, const Action& a, const Action& b);

}  // namespace precritic
