#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "precritic/features.hpp"
#include "precritic/grammar.hpp"
#include "precritic/policy.hpp"
#include "precritic/rng.hpp"
#include "precritic/world.hpp"

namespace precritic {

// A critic maps (world, state, candidate action) to a parsed output, or
// nullopt when its raw output does not follow the grammar.
using CriticFn =
    std::function<std::optional<ParsedOutput>(const World&, const EnvState&, const Action&)>;

// Same, drawing randomness from the caller's stream.
using StochasticCriticFn = std::function<std::optional<ParsedOutput>(
    const World&, const EnvState&, const Action&, Rng&)>;

// Everything needed to run a trained policy as a critic.
struct CriticModel {
  Vocab vocab;
  FeatureSpec spec;
  CriticPolicy policy;
  std::size_t max_len = kFullOutputLength;

  CriticModel(Vocab v, FeatureSpec s, CriticPolicy p)
      : vocab(std::move(v)), spec(s), policy(std::move(p)) {}

  // Fresh zero-weight policy for a vocabulary.
  static CriticModel zero(Vocab vocab);

  FeatureVector features(const World& world, const EnvState& state, const Action& action) const {
    return featurize(spec, vocab, world, state, action);
  }
};

CriticFn oracle_critic_fn();

// Always emits the given score and suggestion.
CriticFn constant_critic_fn(int score, Action suggestion = Action::done());

// Greedy decoding of a trained policy.
CriticFn learned_critic_fn(std::shared_ptr<const CriticModel> model);

// Oracle whose score is flipped with probability `error`.
StochasticCriticFn noisy_oracle_fn(double error);

// Oracle with epsilon-greedy corruption: with probability epsilon the score is
// redrawn uniformly from {0,1}; independently with probability epsilon the
// suggestion is redrawn uniformly from the available actions. The critique
// follows the emitted score. Never sees annotations.
StochasticCriticFn corrupted_oracle_fn(double epsilon);

StochasticCriticFn as_stochastic(CriticFn critic);

}  // namespace precritic
