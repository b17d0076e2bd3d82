#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "precritic/critic.hpp"
#include "precritic/rng.hpp"
#include "precritic/world.hpp"
#include "precritic/world_gen.hpp"

namespace precritic {

// Fallible GUI agent.
struct AgentPolicy {
  enum class Mode { Oracle, NoisyOptimal, UniformRandom };

  Mode mode = Mode::Oracle;
  double eta = 0.0;  // NoisyOptimal error rate

  static AgentPolicy oracle() { return {Mode::Oracle, 0.0}; }
  static AgentPolicy noisy(double eta) { return {Mode::NoisyOptimal, eta}; }
  static AgentPolicy uniform() { return {Mode::UniformRandom, 0.0}; }

  // Picks an available action. Oracle takes the smallest optimal action;
  // NoisyOptimal takes a uniformly drawn optimal action with probability
  // 1 - eta and otherwise a uniformly drawn non-optimal one (optimal if there
  // is none); UniformRandom ignores the goal. `excluded` is never returned
  // unless it is the only available action.
  Action decide(const World& world, const EnvState& state, Rng& rng,
                const Action* excluded = nullptr) const;
};

std::string agent_name(const AgentPolicy& agent);

enum class CriticMode { None, Pre, Post };

std::string_view critic_mode_name(CriticMode mode);
std::optional<CriticMode> critic_mode_from_name(std::string_view name);

struct TrajectoryStep {
  EnvState before;
  Action proposed;
  std::optional<int> verdict;  // critic score, when consulted and parseable
  std::optional<Action> suggestion;
  Action executed;
  bool remedial = false;  // post-critic Back
};

struct EpisodeResult {
  std::string world;
  std::string task;
  bool success = false;
  int steps = 0;  // executed actions, remedial ones included
  std::vector<TrajectoryStep> trajectory;
  bool reached_dead_end = false;  // distance_to_goal became none before termination
};

// Runs one episode. `critic` must be set iff mode != None.
//   None: the agent's proposal executes.
//   Pre:  the critic judges the proposal first; on rejection the agent adopts
//         the suggestion if it is available (even when it repeats the
//         proposal), else re-decides excluding the proposal. The second
//         decision executes without another critique.
//   Post: the proposal executes, then the critic judges it on the pre-step
//         state; on rejection Back executes if available (counted) and the
//         next decision excludes the rejected action.
EpisodeResult run_episode(const World& world, std::size_t task, const AgentPolicy& agent,
                          CriticMode mode, const CriticFn* critic, Rng& rng);

struct SuiteConfig {
  std::string name;
  CriticMode mode = CriticMode::None;
  CriticFn critic;  // empty for None
};

struct TaskRef {
  std::string world;
  std::size_t task = 0;
};

struct SuiteRow {
  std::string config;
  std::string world;
  std::string task;
  std::uint64_t seed = 0;
  EpisodeResult result;
};

// Agent randomness for an episode, keyed by (world, task, seed) only, so every
// configuration replays the same agent stream.
std::uint64_t episode_seed(std::string_view world, std::string_view task, std::uint64_t seed);

// Cross product tasks x seeds x configs, ordered config-major.
std::vector<SuiteRow> run_suite(const WorldSet& worlds, const std::vector<TaskRef>& tasks,
                                const AgentPolicy& agent, const std::vector<SuiteConfig>& configs,
                                const std::vector<std::uint64_t>& seeds);

nlohmann::json episode_to_json(const World& world, const SuiteRow& row);

}  // namespace precritic
