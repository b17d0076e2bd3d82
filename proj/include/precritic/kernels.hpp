#pragma once

// Batch kernels. Each exists as a plain serial loop and as an OpenMP
// version; both reduce per-item results in input order, so their outputs are
// bitwise identical and independent of the thread count.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "precritic/agent.hpp"
#include "precritic/critic.hpp"
#include "precritic/dataset.hpp"
#include "precritic/grpo.hpp"
#include "precritic/policy.hpp"

namespace precritic {

struct RftTarget {
  FeatureVector features;
  std::vector<TokenId> tokens;
};

struct BatchGradient {
  double mean_loss = 0.0;  // mean negative log-likelihood
  SparseGrad grad;         // gradient of mean_loss
};

struct GroupTask {
  const GrpoInput* input = nullptr;
  std::uint64_t seed = 0;
};

struct EpisodeJob {
  const World* world = nullptr;
  std::size_t task = 0;
  std::uint64_t seed = 0;
  std::size_t config = 0;  // index into the SuiteConfig list
};

namespace serial {

BatchGradient rft_gradient(const CriticPolicy& policy, std::span<const RftTarget> targets);

std::vector<GroupResult> grpo_groups(const CriticPolicy& policy, const CriticPolicy& old_policy,
                                     const CriticPolicy& ref, const Vocab& vocab,
                                     std::span<const GroupTask> tasks, const TrainConfig& cfg);

std::vector<EpisodeResult> run_episodes(std::span<const EpisodeJob> jobs, const AgentPolicy& agent,
                                        const std::vector<SuiteConfig>& configs);

std::vector<std::optional<ParsedOutput>> judge_samples(const WorldSet& worlds,
                                                       std::span<const Sample> samples,
                                                       const CriticFn& critic);

}  // namespace serial

namespace parallel {

BatchGradient rft_gradient(const CriticPolicy& policy, std::span<const RftTarget> targets);

std::vector<GroupResult> grpo_groups(const CriticPolicy& policy, const CriticPolicy& old_policy,
                                     const CriticPolicy& ref, const Vocab& vocab,
                                     std::span<const GroupTask> tasks, const TrainConfig& cfg);

std::vector<EpisodeResult> run_episodes(std::span<const EpisodeJob> jobs, const AgentPolicy& agent,
                                        const std::vector<SuiteConfig>& configs);

std::vector<std::optional<ParsedOutput>> judge_samples(const WorldSet& worlds,
                                                       std::span<const Sample> samples,
                                                       const CriticFn& critic);

}  // namespace parallel

// Sum of group gradients in task order (shared by both kernel flavours).
SparseGrad reduce_groups(std::span<const GroupResult> groups, std::size_t vocab_size);

}  // namespace precritic
