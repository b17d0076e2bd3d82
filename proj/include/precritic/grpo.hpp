#pragma once

#include <vector>

#include "precritic/features.hpp"
#include "precritic/policy.hpp"
#include "precritic/rewards.hpp"
#include "precritic/train_config.hpp"
#include "precritic/world.hpp"

namespace precritic {

// One S-GRPO input: a (state, action) pair with its annotations.
struct GrpoInput {
  const World* world = nullptr;
  EnvState state;
  Action action;
  int label = 0;
  Action suggestion;
  FeatureVector features;
};

struct OutputRecord {
  std::vector<TokenId> tokens;
  RewardBreakdown reward;
  double advantage = 0.0;
  double logprob_old = 0.0;
  double logprob_ref = 0.0;
  // Filled by group_objective for the policy being optimized.
  double logprob = 0.0;
  double ratio = 1.0;      // pi / pi_old
  double surrogate = 0.0;  // min(ratio * A, clip(ratio) * A)
  double kl = 0.0;         // D(pi || pi_ref) for this output
  bool clipped = false;    // the clipped branch was selected and is active
};

struct GroupResult {
  std::vector<OutputRecord> outputs;
  double objective = 0.0;  // sum over outputs of surrogate - beta * kl
  SparseGrad grad;         // gradient of `objective`
};

// Draws cfg.group_size outputs from the frozen old policy, scores them and
// computes advantages and reference log-probabilities.
std::vector<OutputRecord> sample_group(const CriticPolicy& old_policy, const CriticPolicy& ref,
                                       const Vocab& vocab, const GrpoInput& input,
                                       const TrainConfig& cfg, Rng& rng);

// Clipped surrogate minus the KL penalty for fixed sampled outputs, summed
// over the group, with its exact gradient w.r.t. `policy`. The ratio uses
// sequence-level probabilities; the KL gradient flows through both
// occurrences of pi.
GroupResult group_objective(const CriticPolicy& policy, std::vector<OutputRecord> outputs,
                            const FeatureVector& features, const TrainConfig& cfg);

}  // namespace precritic
