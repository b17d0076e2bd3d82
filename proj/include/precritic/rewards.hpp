#pragma once

#include <optional>
#include <span>
#include <vector>

#include "precritic/grammar.hpp"
#include "precritic/train_config.hpp"
#include "precritic/world.hpp"

namespace precritic {

struct RewardBreakdown {
  int r_f = 0;
  int r_a = 0;
  int r_s = 0;
  double r = 0.0;
};

// 1 iff the tokens follow the critic grammar.
int reward_format(const Vocab& vocab, std::span<const TokenId> tokens);

// 1 iff the output parsed and its score equals the label.
int reward_accuracy(const std::optional<ParsedOutput>& parsed, int label);

// 1 iff the output parsed and its suggestion is similar to the annotation.
int reward_suggestion(const std::optional<ParsedOutput>& parsed, const Action& annotated,
                      const World& world, const EnvState& state);

// lambda_f * r_f + lambda_s * r_s + (1 - lambda_f - lambda_s) * r_a
double combine_rewards(const TrainConfig& cfg, int r_f, int r_a, int r_s);

RewardBreakdown score_output(const TrainConfig& cfg, const Vocab& vocab,
                             std::span<const TokenId> tokens, int label, const Action& annotated,
                             const World& world, const EnvState& state);

// Group-normalized advantages with the population standard deviation; all
// zero when the standard deviation is below 1e-8.
std::vector<double> group_advantages(std::span<const double> rewards);

// ratio - ln(ratio) - 1 for ratio = pi_ref / pi. Throws std::domain_error
// for a non-positive ratio.
double kl_term(double ratio);

}  // namespace precritic
