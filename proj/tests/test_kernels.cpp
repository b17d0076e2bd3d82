#include <omp.h>

#include "doctest.h"
#include "precritic/experiment.hpp"
#include "precritic/kernels.hpp"
#include "precritic/trainer.hpp"

using namespace precritic;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.mobile.count = 3;
  cfg.mobile.params.tasks = 4;
  return cfg;
}

// A non-trivial policy so sampling and gradients are not uniform.
CriticModel warmed_model(const WorldSet& worlds, const CollectedData& data) {
  auto model = fresh_model(worlds);
  const auto targets = rft_targets(model, worlds, data.train, data.cot);
  for (int i = 0; i < 3; ++i) rft_step(model.policy, targets, 0.5);
  return model;
}

struct Fixture {
  ExperimentConfig cfg = small_config();
  WorldSet worlds = build_worlds(cfg);
  CollectedData data = collect(worlds, cfg);
  CriticModel model = warmed_model(worlds, data);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void check_same(const SparseGrad& a, const SparseGrad& b) {
  REQUIRE(a.columns() == b.columns());
  for (std::size_t s = 0; s < a.columns().size(); ++s) {
    const auto x = a.column_at(s);
    const auto y = b.column_at(s);
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
  }
}

struct Threads {
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("rft gradient: serial and parallel agree bitwise") {
  const auto& f = fixture();
  const auto targets = rft_targets(f.model, f.worlds, f.data.train, f.data.cot);
  REQUIRE(targets.size() > 20);
  const auto s = serial::rft_gradient(f.model.policy, targets);
  for (int threads : {1, 3, 4}) {
    Threads t(threads);
    const auto p = parallel::rft_gradient(f.model.policy, targets);
    CHECK(p.mean_loss == s.mean_loss);
    check_same(p.grad, s.grad);
  }
}

TEST_CASE("grpo groups: serial and parallel agree bitwise") {
  const auto& f = fixture();
  const auto inputs = grpo_inputs(f.model, f.worlds, f.data.train);
  std::vector<GroupTask> tasks;
  for (std::size_t i = 0; i < inputs.size(); ++i) tasks.push_back({&inputs[i], 1000 + i});
  const TrainConfig cfg;
  const auto ref = CriticModel::zero(f.model.vocab).policy;
  const auto s = serial::grpo_groups(f.model.policy, f.model.policy, ref, f.model.vocab, tasks, cfg);
  Threads t(4);
  const auto p = parallel::grpo_groups(f.model.policy, f.model.policy, ref, f.model.vocab, tasks, cfg);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].objective == p[i].objective);
    REQUIRE(s[i].outputs.size() == p[i].outputs.size());
    for (std::size_t k = 0; k < s[i].outputs.size(); ++k) {
      CHECK(s[i].outputs[k].tokens == p[i].outputs[k].tokens);
      CHECK(s[i].outputs[k].logprob == p[i].outputs[k].logprob);
    }
  }
  check_same(reduce_groups(s, f.model.policy.vocab_size()),
             reduce_groups(p, f.model.policy.vocab_size()));
}

TEST_CASE("episodes and judging: serial and parallel agree") {
  const auto& f = fixture();
  auto model = std::make_shared<CriticModel>(f.model);
  const std::vector<SuiteConfig> configs = {
      {"baseline", CriticMode::None, {}},
      {"pre", CriticMode::Pre, learned_critic_fn(model)},
      {"post", CriticMode::Post, learned_critic_fn(model)},
  };
  std::vector<EpisodeJob> jobs;
  for (const auto& e : f.worlds.entries()) {
    for (std::size_t t = 0; t < e.world.tasks().size(); ++t) {
      for (std::size_t c = 0; c < configs.size(); ++c) jobs.push_back({&e.world, t, 7, c});
    }
  }
  const auto agent = AgentPolicy::noisy(0.3);
  const auto s = serial::run_episodes(jobs, agent, configs);
  Threads t(4);
  const auto p = parallel::run_episodes(jobs, agent, configs);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].success == p[i].success);
    CHECK(s[i].steps == p[i].steps);
    REQUIRE(s[i].trajectory.size() == p[i].trajectory.size());
    for (std::size_t k = 0; k < s[i].trajectory.size(); ++k) {
      CHECK(s[i].trajectory[k].executed == p[i].trajectory[k].executed);
    }
  }

  const auto critic = learned_critic_fn(model);
  const auto js = serial::judge_samples(f.worlds, f.data.test_i.samples, critic);
  const auto jp = parallel::judge_samples(f.worlds, f.data.test_i.samples, critic);
  CHECK(js == jp);
}
