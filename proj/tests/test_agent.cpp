#include <map>
#include <set>

#include "doctest.h"
#include "precritic/agent.hpp"
#include "precritic/metrics.hpp"
#include "support.hpp"

using namespace precritic;

namespace {

const CriticFn& oracle() {
  static const CriticFn fn = oracle_critic_fn();
  return fn;
}

// First seed whose episode under `mode` matches `pred`.
template <typename Pred>
std::optional<std::uint64_t> find_seed(const World& w, const AgentPolicy& agent, CriticMode mode,
                                       Pred pred) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng(seed);
    const auto r = run_episode(w, 0, agent, mode, mode == CriticMode::None ? nullptr : &oracle(), rng);
    if (pred(r)) return seed;
  }
  return std::nullopt;
}

WorldSet trap_worlds(int count) {
  WorldSet ws;
  GeneratorParams p;
  p.screens = 10;
  p.trap_probability = 0.5;
  p.tasks = 4;
  for (int k = 0; k < count; ++k) ws.add(generate_world(300 + k, p), Family::Mobile);
  return ws;
}

}  // namespace

TEST_CASE("oracle agent walks a shortest path") {
  for (const char* name : {"chain", "diamond", "diamond5", "trap"}) {
    const World w = testing::fixture(name);
    for (std::size_t t = 0; t < w.tasks().size(); ++t) {
      Rng rng(1);
      const auto r = run_episode(w, t, AgentPolicy::oracle(), CriticMode::None, nullptr, rng);
      CAPTURE(name);
      CHECK(r.success);
      CHECK(r.steps == *testing::brute_force_distance(w, initial_state(w, t)));
      CHECK(r.steps == static_cast<int>(r.trajectory.size()));
    }
  }
}

TEST_CASE("critic presence must match the mode") {
  const World w = testing::fixture("chain");
  Rng rng(1);
  CHECK_THROWS_AS(run_episode(w, 0, AgentPolicy::oracle(), CriticMode::Pre, nullptr, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_episode(w, 0, AgentPolicy::oracle(), CriticMode::None, &oracle(), rng),
                  std::invalid_argument);
}

TEST_CASE("pre-critic vetoes the trap and the episode still succeeds") {
  const World w = testing::fixture("trap");
  const auto agent = AgentPolicy::noisy(0.5);
  const auto seed = find_seed(w, agent, CriticMode::Pre, [](const EpisodeResult& r) {
    return r.trajectory.front().proposed == Action{ActionKind::LongPress, "del"};
  });
  REQUIRE(seed);
  Rng rng(*seed);
  const auto r = run_episode(w, 0, agent, CriticMode::Pre, &oracle(), rng);
  const auto& first = r.trajectory.front();
  CHECK(first.verdict == 0);
  CHECK(first.suggestion == Action::click("next"));
  CHECK(first.executed == Action::click("next"));
  CHECK_FALSE(r.reached_dead_end);
  CHECK(r.success);

  // Without the critic the same stream walks into the trap.
  Rng base_rng(*seed);
  const auto b = run_episode(w, 0, agent, CriticMode::None, nullptr, base_rng);
  CHECK(b.trajectory.front().executed == Action{ActionKind::LongPress, "del"});
  CHECK_FALSE(b.success);
}

TEST_CASE("post-critic recovery costs at least two extra steps") {
  const World w = testing::fixture("trap");
  const auto agent = AgentPolicy::noisy(0.5);
  const Action side = Action::click("side");
  const auto seed = find_seed(w, agent, CriticMode::Post, [&](const EpisodeResult& r) {
    return r.success && r.trajectory.size() > 1 &&
           r.trajectory[0].executed == Action::click("next") && r.trajectory[1].executed == side;
  });
  REQUIRE(seed);
  Rng post_rng(*seed);
  const auto post = run_episode(w, 0, agent, CriticMode::Post, &oracle(), post_rng);
  REQUIRE(post.trajectory.size() > 2);
  CHECK(post.trajectory[1].verdict == 0);
  CHECK(post.trajectory[2].remedial);
  CHECK(post.trajectory[2].executed == Action::back());
  CHECK(post.trajectory[3].proposed != side);

  Rng pre_rng(*seed);
  const auto pre = run_episode(w, 0, agent, CriticMode::Pre, &oracle(), pre_rng);
  CHECK(pre.success);
  CHECK(post.success);
  CHECK(post.steps >= pre.steps + 2);
  CHECK(post.steps == static_cast<int>(post.trajectory.size()));
}

TEST_CASE("suite cross product and pairing") {
  const auto ws = trap_worlds(5);
  std::vector<TaskRef> tasks;
  for (const auto& e : ws.entries()) {
    for (std::size_t t = 0; t < 2; ++t) tasks.push_back({e.world.name(), t});
  }
  REQUIRE(tasks.size() == 10);
  const std::vector<SuiteConfig> configs = {
      {"baseline", CriticMode::None, {}},
      {"pre", CriticMode::Pre, oracle()},
      {"post", CriticMode::Post, oracle()},
  };
  const auto rows = run_suite(ws, tasks, AgentPolicy::noisy(0.3), configs, {1, 2, 3});
  CHECK(rows.size() == 90);
  std::map<std::string, std::set<std::tuple<std::string, std::string, std::uint64_t>>> keys;
  for (const auto& r : rows) keys[r.config].insert({r.world, r.task, r.seed});
  REQUIRE(keys.size() == 3);
  CHECK(keys["baseline"].size() == 30);
  CHECK(keys["baseline"] == keys["pre"]);
  CHECK(keys["baseline"] == keys["post"]);

  // Same inputs, same results.
  const auto again = run_suite(ws, tasks, AgentPolicy::noisy(0.3), configs, {1, 2, 3});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].result.steps == again[i].result.steps);
    CHECK(rows[i].result.success == again[i].result.success);
  }

  for (const auto& r : rows) {
    CHECK(r.result.steps == static_cast<int>(r.result.trajectory.size()));
    for (const auto& st : r.result.trajectory) {
      // One critique and at most one re-decision per step.
      if (r.config == "pre" && st.verdict == 0) CHECK(st.executed != st.proposed);
      if (r.config != "post") CHECK_FALSE(st.remedial);
    }
  }
}

TEST_CASE("oracle critic never fires for the oracle agent") {
  const auto ws = trap_worlds(3);
  std::vector<TaskRef> tasks;
  for (const auto& e : ws.entries()) {
    for (std::size_t t = 0; t < e.world.tasks().size(); ++t) tasks.push_back({e.world.name(), t});
  }
  const auto rows = run_suite(ws, tasks, AgentPolicy::oracle(),
                              {{"baseline", CriticMode::None, {}}, {"pre", CriticMode::Pre, oracle()}},
                              {0, 1});
  const std::size_t half = rows.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const auto& a = rows[i].result;
    const auto& b = rows[half + i].result;
    CHECK(a.success);
    CHECK(a.steps == b.steps);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
      CHECK(a.trajectory[k].executed == b.trajectory[k].executed);
      CHECK(b.trajectory[k].verdict == 1);
    }
  }
}

TEST_CASE("uniform agent on a trap world: the pre-critic removes failures") {
  const World w = testing::fixture("trap");
  WorldSet ws;
  ws.add(w, Family::Mobile);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 200; ++s) seeds.push_back(s);
  const auto rows = run_suite(ws, {{"trap", 0}}, AgentPolicy::uniform(),
                              {{"baseline", CriticMode::None, {}}, {"pre", CriticMode::Pre, oracle()}},
                              seeds);
  const std::span<const SuiteRow> all(rows);
  const double base = success_rate(all.subspan(0, 200));
  const double pre = success_rate(all.subspan(200));
  CHECK(base < pre);
  for (const auto& r : all.subspan(200)) CHECK_FALSE(r.result.reached_dead_end);
}

TEST_CASE("noisy agent draws its error from the non-optimal actions") {
  const World w = testing::fixture("diamond5");
  const auto s0 = initial_state(w, 0);
  Rng rng(2);
  std::map<Action, int> counts;
  const int n = 6000;
  for (int i = 0; i < n; ++i) counts[AgentPolicy::noisy(0.3).decide(w, s0, rng)]++;
  // One optimal of four: 0.7 on it, 0.1 on each of the others.
  for (const auto& [a, c] : counts) {
    const double expect = a == Action::click("a") ? 0.7 : 0.1;
    CHECK(std::abs(static_cast<double>(c) / n - expect) < 5 * std::sqrt(expect * (1 - expect) / n));
  }
  CHECK(counts.size() == 4);

  const Action excluded = Action::click("a");
  for (int i = 0; i < 100; ++i) CHECK(AgentPolicy::noisy(0.0).decide(w, s0, rng, &excluded) != excluded);
}
