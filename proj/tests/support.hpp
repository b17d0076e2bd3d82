#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "precritic/world.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(PRECRITIC_TEST_DATA) / name;
}

inline precritic::World fixture(const std::string& name) {
  return precritic::load_world(data_path(name + ".json"));
}

// Minimum number of actions (Done included) that finishes the task, found by
// iterative deepening over step(); nullopt when nothing within `limit` works.
inline std::optional<int> brute_force_distance(const precritic::World& world,
                                               const precritic::EnvState& state, int limit = 12) {
  using namespace precritic;
  struct Search {
    const World& w;
    bool reach(const EnvState& s, int depth) const {
      if (is_success(w, s)) return true;
      if (s.terminal || depth == 0) return false;
      for (const auto& a : available_actions(w, s)) {
        if (reach(step(w, s, a).state, depth - 1)) return true;
      }
      return false;
    }
  } search{world};
  if (state.terminal) return is_success(world, state) ? std::optional<int>(0) : std::nullopt;
  for (int d = 1; d <= limit; ++d) {
    if (search.reach(state, d)) return d;
  }
  return std::nullopt;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

}  // namespace testing
