// Serial vs OpenMP timing of the four batch kernels on one generated
// experiment. Usage: bench_kernels [repeats] [threads]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "precritic/experiment.hpp"
#include "precritic/kernels.hpp"
#include "precritic/trainer.hpp"

using namespace precritic;

namespace {

double time_ms(int repeats, const std::function<void()>& fn) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void row(const char* name, std::size_t items, double serial_ms, double parallel_ms) {
  std::printf("%-14s %8zu %12.3f %12.3f %8.2fx\n", name, items, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  if (argc > 2) omp_set_num_threads(std::atoi(argv[2]));

  ExperimentConfig cfg;
  cfg.seed = 11;
  const auto worlds = build_worlds(cfg);
  const auto data = collect(worlds, cfg);
  auto model = fresh_model(worlds);
  const auto targets = rft_targets(model, worlds, data.train, data.cot);
  for (int i = 0; i < 5; ++i) rft_step(model.policy, targets, 0.5);
  const auto inputs = grpo_inputs(model, worlds, data.train);
  std::vector<GroupTask> tasks;
  for (std::size_t i = 0; i < inputs.size(); ++i) tasks.push_back({&inputs[i], i});
  const TrainConfig tc;

  auto shared = std::make_shared<const CriticModel>(model);
  const std::vector<SuiteConfig> configs = {{"baseline", CriticMode::None, {}},
                                            {"pre", CriticMode::Pre, learned_critic_fn(shared)}};
  std::vector<EpisodeJob> jobs;
  for (const auto& e : worlds.entries()) {
    for (std::size_t t = 0; t < e.world.tasks().size(); ++t) {
      for (std::uint64_t s = 0; s < 8; ++s) {
        for (std::size_t c = 0; c < configs.size(); ++c) jobs.push_back({&e.world, t, s, c});
      }
    }
  }
  const auto agent = AgentPolicy::noisy(0.3);
  const auto critic = learned_critic_fn(shared);
  const auto& samples = data.test_i.samples;

  std::printf("threads %d, repeats %d\n", omp_get_max_threads(), repeats);
  std::printf("%-14s %8s %12s %12s %9s\n", "kernel", "items", "serial ms", "parallel ms", "speedup");
  row("rft_gradient", targets.size(),
      time_ms(repeats, [&] { serial::rft_gradient(model.policy, targets); }),
      time_ms(repeats, [&] { parallel::rft_gradient(model.policy, targets); }));
  row("grpo_groups", tasks.size(),
      time_ms(repeats, [&] { serial::grpo_groups(model.policy, model.policy, model.policy, model.vocab, tasks, tc); }),
      time_ms(repeats, [&] { parallel::grpo_groups(model.policy, model.policy, model.policy, model.vocab, tasks, tc); }));
  row("run_episodes", jobs.size(),
      time_ms(repeats, [&] { serial::run_episodes(jobs, agent, configs); }),
      time_ms(repeats, [&] { parallel::run_episodes(jobs, agent, configs); }));
  row("judge_samples", samples.size(),
      time_ms(repeats, [&] { serial::judge_samples(worlds, samples, critic); }),
      time_ms(repeats, [&] { parallel::judge_samples(worlds, samples, critic); }));
  return 0;
}
