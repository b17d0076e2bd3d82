#include "precritic/oracle.hpp"

#include <algorithm>

namespace precritic {

ScreenId predicted_screen(const World& world, const EnvState& state, const Action& action) {
  if (action.is_done()) return state.screen;
  const Edge* e = world.find_edge(state.screen, action);
  return e ? e->to : state.screen;
}

ParsedOutput oracle_critic(const World& world, const EnvState& state, const Action& action) {
  const auto optimal = optimal_actions(world, state);
  ParsedOutput out;
  out.score = std::binary_search(optimal.begin(), optimal.end(), action) ? 1 : 0;
  out.suggestion = optimal.front();
  out.thinking = Thinking{world.screen(state.screen).id,
                          world.screen(predicted_screen(world, state, action)).id, out.score};
  return out;
}

bool similar(const World& world, const EnvState& state, const Action& a, const Action& b) {
  if (a == b) return true;
  if (!distance_to_goal(world, state)) return false;
  const auto optimal = optimal_actions(world, state);
  return std::binary_search(optimal.begin(), optimal.end(), a) &&
         std::binary_search(optimal.begin(), optimal.end(), b);
}

}  // namespace precritic
