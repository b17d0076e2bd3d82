#include "precritic/agent.hpp"

#include <algorithm>
#include <stdexcept>

#include "precritic/kernels.hpp"

namespace precritic {

Action AgentPolicy::decide(const World& world, const EnvState& state, Rng& rng,
                           const Action* excluded) const {
  auto avail = available_actions(world, state);
  if (excluded && avail.size() > 1) std::erase(avail, *excluded);

  std::vector<Action> optimal;
  if (distance_to_goal(world, state)) {
    for (const auto& a : optimal_actions(world, state)) {
      if (std::find(avail.begin(), avail.end(), a) != avail.end()) optimal.push_back(a);
    }
  }

  switch (mode) {
    case Mode::Oracle:
      return optimal.empty() ? avail.front() : optimal.front();
    case Mode::UniformRandom:
      return avail[uniform_index(rng, avail.size())];
    case Mode::NoisyOptimal: {
      const bool err = bernoulli(rng, eta);
      if (optimal.empty()) return avail[uniform_index(rng, avail.size())];
      std::vector<Action> wrong;
      for (const auto& a : avail) {
        if (!std::binary_search(optimal.begin(), optimal.end(), a)) wrong.push_back(a);
      }
      if (err && !wrong.empty()) return wrong[uniform_index(rng, wrong.size())];
      return optimal[uniform_index(rng, optimal.size())];
    }
  }
  throw std::logic_error("unknown agent mode");
}

std::string agent_name(const AgentPolicy& agent) {
  switch (agent.mode) {
    case AgentPolicy::Mode::Oracle: return "oracle";
    case AgentPolicy::Mode::UniformRandom: return "uniform";
    case AgentPolicy::Mode::NoisyOptimal: return "noisy(" + std::to_string(agent.eta) + ")";
  }
  return "?";
}

std::string_view critic_mode_name(CriticMode mode) {
  switch (mode) {
    case CriticMode::None: return "none";
    case CriticMode::Pre: return "pre";
    case CriticMode::Post: return "post";
  }
  return "?";
}

std::optional<CriticMode> critic_mode_from_name(std::string_view name) {
  if (name == "none") return CriticMode::None;
  if (name == "pre") return CriticMode::Pre;
  if (name == "post") return CriticMode::Post;
  return std::nullopt;
}

EpisodeResult run_episode(const World& world, std::size_t task, const AgentPolicy& agent,
                          CriticMode mode, const CriticFn* critic, Rng& rng) {
  if ((mode == CriticMode::None) != (critic == nullptr || !*critic)) {
    throw std::invalid_argument("critic must be provided iff critic mode is not none");
  }
  const auto& t = world.tasks().at(task);
  EpisodeResult result;
  result.world = world.name();
  result.task = t.id;

  EnvState state = initial_state(world, task);
  std::optional<Action> exclude_next;
  auto budget_left = [&] { return static_cast<int>(state.step_count()) < t.max_steps; };
  auto execute = [&](TrajectoryStep rec, const Action& a) {
    rec.executed = a;
    state = step(world, state, a).state;
    if (!distance_to_goal(world, state)) result.reached_dead_end = true;
    result.trajectory.push_back(std::move(rec));
  };

  while (!state.terminal && budget_left()) {
    TrajectoryStep rec;
    rec.before = state;
    const Action* excluded = exclude_next ? &*exclude_next : nullptr;
    rec.proposed = agent.decide(world, state, rng, excluded);
    exclude_next.reset();

    if (mode == CriticMode::Pre) {
      const auto verdict = (*critic)(world, state, rec.proposed);
      Action chosen = rec.proposed;
      if (verdict) {
        rec.verdict = verdict->score;
        rec.suggestion = verdict->suggestion;
        if (verdict->score == 0) {
          if (is_available(world, state, verdict->suggestion)) {
            chosen = verdict->suggestion;
          } else {
            chosen = agent.decide(world, state, rng, &rec.proposed);
          }
        }
      }
      execute(std::move(rec), chosen);
      continue;
    }

    const EnvState before = state;
    const Action proposed = rec.proposed;
    execute(std::move(rec), proposed);
    if (mode != CriticMode::Post || state.terminal) continue;

    const auto verdict = (*critic)(world, before, proposed);
    auto& last = result.trajectory.back();
    if (verdict) {
      last.verdict = verdict->score;
      last.suggestion = verdict->suggestion;
    }
    if (!verdict || verdict->score != 0) continue;
    if (budget_left() && world.find_edge(state.screen, Action::back())) {
      TrajectoryStep remedy;
      remedy.before = state;
      remedy.proposed = Action::back();
      remedy.remedial = true;
      execute(std::move(remedy), Action::back());
    }
    if (state.screen == before.screen) exclude_next = proposed;
  }

  result.steps = static_cast<int>(state.step_count());
  result.success = is_success(world, state);
  return result;
}

std::uint64_t episode_seed(std::string_view world, std::string_view task, std::uint64_t seed) {
  return derive_seed(seed, {stable_hash("episode"), stable_hash(world), stable_hash(task)});
}

std::vector<SuiteRow> run_suite(const WorldSet& worlds, const std::vector<TaskRef>& tasks,
                                const AgentPolicy& agent, const std::vector<SuiteConfig>& configs,
                                const std::vector<std::uint64_t>& seeds) {
  std::vector<EpisodeJob> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (const auto& ref : tasks) {
      for (auto seed : seeds) jobs.push_back({&worlds.get(ref.world), ref.task, seed, c});
    }
  }
  const auto results = parallel::run_episodes(jobs, agent, configs);
  std::vector<SuiteRow> rows;
  rows.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    rows.push_back({configs[jobs[i].config].name, results[i].world, results[i].task, jobs[i].seed,
                    results[i]});
  }
  return rows;
}

nlohmann::json episode_to_json(const World& world, const SuiteRow& row) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : row.result.trajectory) {
    nlohmann::json j;
    j["screen"] = world.screen(s.before.screen).id;
    j["proposed"] = to_json(s.proposed);
    j["verdict"] = s.verdict ? nlohmann::json(*s.verdict) : nlohmann::json(nullptr);
    j["suggestion"] = s.suggestion ? to_json(*s.suggestion) : nlohmann::json(nullptr);
    j["executed"] = to_json(s.executed);
    j["remedial"] = s.remedial;
    steps.push_back(std::move(j));
  }
  return {{"config", row.config}, {"world", row.world},   {"task", row.task},
          {"seed", row.seed},     {"success", row.result.success},
          {"steps", row.result.steps}, {"trajectory", std::move(steps)}};
}

}  // namespace precritic
