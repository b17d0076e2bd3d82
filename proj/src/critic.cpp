#include "precritic/critic.hpp"

#include "precritic/oracle.hpp"

namespace precritic {

CriticModel CriticModel::zero(Vocab vocab) {
  auto spec = FeatureSpec::for_vocab(vocab);
  CriticPolicy policy(vocab.size(), spec.dimension(), vocab.hash(), spec.hash());
  return CriticModel(std::move(vocab), spec, std::move(policy));
}

CriticFn oracle_critic_fn() {
  return [](const World& w, const EnvState& s, const Action& a) -> std::optional<ParsedOutput> {
    return oracle_critic(w, s, a);
  };
}

CriticFn constant_critic_fn(int score, Action suggestion) {
  return [score, suggestion](const World&, const EnvState&,
                             const Action&) -> std::optional<ParsedOutput> {
    return ParsedOutput{score, suggestion, std::nullopt};
  };
}

CriticFn learned_critic_fn(std::shared_ptr<const CriticModel> model) {
  return [model](const World& w, const EnvState& s, const Action& a) {
    const auto out = greedy(model->policy, model->features(w, s, a), model->max_len);
    return parse(model->vocab, out.tokens);
  };
}

StochasticCriticFn noisy_oracle_fn(double error) {
  return [error](const World& w, const EnvState& s, const Action& a,
                 Rng& rng) -> std::optional<ParsedOutput> {
    auto out = oracle_critic(w, s, a);
    if (error > 0.0 && bernoulli(rng, error)) {
      out.score = 1 - out.score;
      out.thinking->critique = out.score;
    }
    return out;
  };
}

StochasticCriticFn corrupted_oracle_fn(double epsilon) {
  return [epsilon](const World& w, const EnvState& s, const Action& a,
                   Rng& rng) -> std::optional<ParsedOutput> {
    auto out = oracle_critic(w, s, a);
    if (bernoulli(rng, epsilon)) out.score = static_cast<int>(uniform_index(rng, 2));
    if (bernoulli(rng, epsilon)) {
      const auto avail = available_actions(w, s);
      out.suggestion = avail[uniform_index(rng, avail.size())];
    }
    out.thinking->critique = out.score;
    return out;
  };
}

StochasticCriticFn as_stochastic(CriticFn critic) {
  return [critic = std::move(critic)](const World& w, const EnvState& s, const Action& a, Rng&) {
    return critic(w, s, a);
  };
}

}  // namespace precritic
