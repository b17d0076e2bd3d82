#include "precritic/grpo.hpp"

#include <algorithm>
#include <cmath>

namespace precritic {

std::vector<OutputRecord> sample_group(const CriticPolicy& old_policy, const CriticPolicy& ref,
                                       const Vocab& vocab, const GrpoInput& input,
                                       const TrainConfig& cfg, Rng& rng) {
  std::vector<OutputRecord> outputs(static_cast<std::size_t>(cfg.group_size));
  std::vector<double> rewards;
  rewards.reserve(outputs.size());
  for (auto& o : outputs) {
    auto drawn = sample(old_policy, input.features, rng, static_cast<std::size_t>(cfg.max_len));
    o.tokens = std::move(drawn.tokens);
    o.logprob_old = drawn.logprob;
    o.logprob_ref = logprob(ref, input.features, o.tokens);
    o.reward = score_output(cfg, vocab, o.tokens, input.label, input.suggestion, *input.world,
                            input.state);
    rewards.push_back(o.reward.r);
  }
  const auto adv = group_advantages(rewards);
  for (std::size_t i = 0; i < outputs.size(); ++i) outputs[i].advantage = adv[i];
  return outputs;
}

GroupResult group_objective(const CriticPolicy& policy, std::vector<OutputRecord> outputs,
                            const FeatureVector& features, const TrainConfig& cfg) {
  GroupResult g{std::move(outputs), 0.0, SparseGrad(policy.vocab_size())};
  for (auto& o : g.outputs) {
    auto lg = logprob_and_grad(policy, features, o.tokens);
    o.logprob = lg.logprob;
    o.ratio = std::exp(o.logprob - o.logprob_old);
    const double lo = 1.0 - cfg.clip;
    const double hi = 1.0 + cfg.clip;
    const double clipped_ratio = std::clamp(o.ratio, lo, hi);
    const double unclipped = o.ratio * o.advantage;
    const double clipped = clipped_ratio * o.advantage;
    // d surrogate / d logprob: ratio * A on the unclipped branch, 0 when the
    // clipped branch is selected with the clamp active.
    double coeff = 0.0;
    if (unclipped <= clipped) {
      o.surrogate = unclipped;
      coeff = unclipped;
    } else {
      o.surrogate = clipped;
      o.clipped = clipped_ratio != o.ratio;
      if (!o.clipped) coeff = unclipped;
    }
    // D = r - ln r - 1 with r = pi_ref / pi, dD/dlogprob = 1 - r.
    const double r = std::exp(o.logprob_ref - o.logprob);
    o.kl = r - std::log(r) - 1.0;
    coeff -= cfg.beta * (1.0 - r);
    g.objective += o.surrogate - cfg.beta * o.kl;
    g.grad.add(lg.grad, coeff);
  }
  return g;
}

}  // namespace precritic
