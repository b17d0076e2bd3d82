#include "precritic/kernels.hpp"

namespace precritic {

SparseGrad reduce_groups(std::span<const GroupResult> groups, std::size_t vocab_size) {
  SparseGrad total(vocab_size);
  for (const auto& g : groups) total.add(g.grad);
  return total;
}

namespace serial {

BatchGradient rft_gradient(const CriticPolicy& policy, std::span<const RftTarget> targets) {
  BatchGradient out{0.0, SparseGrad(policy.vocab_size())};
  if (targets.empty()) return out;
  const double inv = 1.0 / static_cast<double>(targets.size());
  for (const auto& t : targets) {
    const auto lg = logprob_and_grad(policy, t.features, t.tokens);
    out.mean_loss -= lg.logprob;
    out.grad.add(lg.grad, -1.0);
  }
  out.mean_loss *= inv;
  out.grad.scale(inv);
  return out;
}

std::vector<GroupResult> grpo_groups(const CriticPolicy& policy, const CriticPolicy& old_policy,
                                     const CriticPolicy& ref, const Vocab& vocab,
                                     std::span<const GroupTask> tasks, const TrainConfig& cfg) {
  std::vector<GroupResult> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    Rng rng = make_rng(t.seed);
    auto outputs = sample_group(old_policy, ref, vocab, *t.input, cfg, rng);
    out.push_back(group_objective(policy, std::move(outputs), t.input->features, cfg));
  }
  return out;
}

std::vector<EpisodeResult> run_episodes(std::span<const EpisodeJob> jobs, const AgentPolicy& agent,
                                        const std::vector<SuiteConfig>& configs) {
  std::vector<EpisodeResult> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) {
    const auto& cfg = configs.at(j.config);
    const auto& task = j.world->tasks().at(j.task);
    Rng rng = make_rng(episode_seed(j.world->name(), task.id, j.seed));
    const CriticFn* critic = cfg.mode == CriticMode::None ? nullptr : &cfg.critic;
    out.push_back(run_episode(*j.world, j.task, agent, cfg.mode, critic, rng));
  }
  return out;
}

std::vector<std::optional<ParsedOutput>> judge_samples(const WorldSet& worlds,
                                                       std::span<const Sample> samples,
                                                       const CriticFn& critic) {
  std::vector<std::optional<ParsedOutput>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(critic(worlds.get(s.world), s.state, s.action));
  return out;
}

}  // namespace serial
}  // namespace precritic
