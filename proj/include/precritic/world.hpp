#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "precritic/action.hpp"

namespace precritic {

using ScreenId = std::uint32_t;

struct Screen {
  std::string id;
  std::vector<std::string> elements;
};

struct Edge {
  ScreenId from = 0;
  Action action;
  ScreenId to = 0;
  bool irreversible = false;
};

struct Task {
  std::string id;
  int instruction_id = 0;
  ScreenId start = 0;
  std::vector<ScreenId> goal;
  int max_steps = 1;
};

// Immutable screen graph with tasks. Construction validates every invariant
// and precomputes per-task BFS distances, so a World is safe to share across
// threads.
class World {
 public:
  World(std::vector<Screen> screens, std::vector<Edge> edges, ScreenId home,
        std::vector<Task> tasks, std::string name = {});

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<Screen>& screens() const { return screens_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  ScreenId home() const { return home_; }

  const Screen& screen(ScreenId id) const { return screens_.at(id); }
  std::optional<ScreenId> find_screen(std::string_view id) const;
  std::optional<std::size_t> find_task(std::string_view id) const;

  // Outgoing edges of a screen, sorted by action.
  std::span<const Edge> out_edges(ScreenId screen) const;
  const Edge* find_edge(ScreenId from, const Action& action) const;

  bool is_goal(std::size_t task, ScreenId screen) const;

  // Edge count of the shortest path to any goal screen of `task`
  // (Done excluded); nullopt when unreachable.
  std::optional<int> screen_distance(std::size_t task, ScreenId screen) const;

 private:
  std::string name_;
  std::vector<Screen> screens_;
  std::vector<Edge> edges_;  // grouped by `from`, sorted by action within a group
  std::vector<std::size_t> edge_begin_;  // screens_.size() + 1 offsets into edges_
  ScreenId home_ = 0;
  std::vector<Task> tasks_;
  std::vector<std::vector<int>> distance_;  // [task][screen], -1 = unreachable
  std::unordered_map<std::string, ScreenId> screen_index_;
};

struct EnvState {
  std::size_t task = 0;
  ScreenId screen = 0;
  std::vector<Action> history;
  bool terminal = false;  // Done emitted

  std::size_t step_count() const { return history.size(); }
  bool operator==(const EnvState&) const = default;
};

struct StepResult {
  EnvState state;
  bool penalized = false;  // action was unavailable; screen unchanged
};

EnvState initial_state(const World& world, std::size_t task);

// Deterministic transition. Done ends the episode in place; an unavailable
// action is recorded as a no-op and flagged. Throws std::logic_error when the
// state is already terminal.
StepResult step(const World& world, const EnvState& state, const Action& action);

// Every action with an outgoing edge from the current screen, plus Done. Sorted.
std::vector<Action> available_actions(const World& world, const EnvState& state);

bool is_available(const World& world, const EnvState& state, const Action& action);

bool is_success(const World& world, const EnvState& state);

// Shortest number of remaining steps to finish the task, counting the final
// Done. A terminal state has distance 0 on success and none otherwise.
std::optional<int> distance_to_goal(const World& world, const EnvState& state);

// Actions that reduce distance_to_goal by exactly one, sorted. Throws
// ValidationError when the goal is unreachable from the state.
std::vector<Action> optimal_actions(const World& world, const EnvState& state);

// Rebuilds a state by replaying `history` from the task start.
EnvState replay(const World& world, std::size_t task, std::span<const Action> history);

// World JSON (see README). Unknown fields are rejected.
World world_from_json(const nlohmann::json& j, std::string name = {});
nlohmann::json world_to_json(const World& world);
// Throws ParseError (with line number) or ValidationError.
World load_world(const std::filesystem::path& path);
void save_world(const World& world, const std::filesystem::path& path);
std::string serialize_world(const World& world);

}  // namespace precritic
