#include <omp.h>

#include "precritic/kernels.hpp"

namespace precritic::parallel {

namespace {
// omp loops need a signed induction variable.
using Index = std::ptrdiff_t;
}

BatchGradient rft_gradient(const CriticPolicy& policy, std::span<const RftTarget> targets) {
  BatchGradient out{0.0, SparseGrad(policy.vocab_size())};
  if (targets.empty()) return out;
  std::vector<LogProbGrad> slots(targets.size());
  const auto n = static_cast<Index>(targets.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < n; ++i) {
    slots[i] = logprob_and_grad(policy, targets[i].features, targets[i].tokens);
  }
  for (const auto& lg : slots) {
    out.mean_loss -= lg.logprob;
    out.grad.add(lg.grad, -1.0);
  }
  const double inv = 1.0 / static_cast<double>(targets.size());
  out.mean_loss *= inv;
  out.grad.scale(inv);
  return out;
}

std::vector<GroupResult> grpo_groups(const CriticPolicy& policy, const CriticPolicy& old_policy,
                                     const CriticPolicy& ref, const Vocab& vocab,
                                     std::span<const GroupTask> tasks, const TrainConfig& cfg) {
  std::vector<GroupResult> out(tasks.size());
  const auto n = static_cast<Index>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (Index i = 0; i < n; ++i) {
    Rng rng = make_rng(tasks[i].seed);
    auto outputs = sample_group(old_policy, ref, vocab, *tasks[i].input, cfg, rng);
    out[i] = group_objective(policy, std::move(outputs), tasks[i].input->features, cfg);
  }
  return out;
}

std::vector<EpisodeResult> run_episodes(std::span<const EpisodeJob> jobs, const AgentPolicy& agent,
                                        const std::vector<SuiteConfig>& configs) {
  std::vector<EpisodeResult> out(jobs.size());
  const auto n = static_cast<Index>(jobs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (Index i = 0; i < n; ++i) {
    const auto& j = jobs[i];
    const auto& cfg = configs.at(j.config);
    const auto& task = j.world->tasks().at(j.task);
    Rng rng = make_rng(episode_seed(j.world->name(), task.id, j.seed));
    const CriticFn* critic = cfg.mode == CriticMode::None ? nullptr : &cfg.critic;
    out[i] = run_episode(*j.world, j.task, agent, cfg.mode, critic, rng);
  }
  return out;
}

std::vector<std::optional<ParsedOutput>> judge_samples(const WorldSet& worlds,
                                                       std::span<const Sample> samples,
                                                       const CriticFn& critic) {
  std::vector<std::optional<ParsedOutput>> out(samples.size());
  const auto n = static_cast<Index>(samples.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    out[i] = critic(worlds.get(samples[i].world), samples[i].state, samples[i].action);
  }
  return out;
}

}  // namespace precritic::parallel
