#include "precritic/rewards.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "precritic/error.hpp"
#include "precritic/oracle.hpp"

namespace precritic {

void TrainConfig::validate() const {
  if (!(lambda_f >= 0.0 && lambda_s >= 0.0)) throw ValidationError("reward weights must be >= 0");
  if (!(lambda_f + lambda_s < 1.0)) throw ValidationError("lambda_f + lambda_s must be < 1");
  if (group_size < 2) throw ValidationError("group size must be >= 2");
  if (!(clip > 0.0 && clip < 1.0)) throw ValidationError("clip epsilon must be in (0, 1)");
  if (!(beta >= 0.0)) throw ValidationError("KL coefficient must be >= 0");
  if (!(learning_rate > 0.0) || !(rft_learning_rate > 0.0)) {
    throw ValidationError("learning rates must be positive");
  }
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (epochs < 0 || rft_epochs < 0) throw ValidationError("epoch counts must be >= 0");
  if (max_len < static_cast<int>(kShortOutputLength)) {
    throw ValidationError("max_len must be >= " + std::to_string(kShortOutputLength));
  }
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"lambda_f", c.lambda_f},
          {"lambda_s", c.lambda_s},
          {"group_size", c.group_size},
          {"clip", c.clip},
          {"beta", c.beta},
          {"learning_rate", c.learning_rate},
          {"rft_learning_rate", c.rft_learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"rft_epochs", c.rft_epochs},
          {"seed", c.seed},
          {"max_len", c.max_len}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw ParseError("train: expected object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "lambda_f") c.lambda_f = v.get<double>();
      else if (key == "lambda_s") c.lambda_s = v.get<double>();
      else if (key == "group_size") c.group_size = v.get<int>();
      else if (key == "clip") c.clip = v.get<double>();
      else if (key == "beta") c.beta = v.get<double>();
      else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "rft_learning_rate") c.rft_learning_rate = v.get<double>();
      else if (key == "batch_size") c.batch_size = v.get<int>();
      else if (key == "epochs") c.epochs = v.get<int>();
      else if (key == "rft_epochs") c.rft_epochs = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "max_len") c.max_len = v.get<int>();
      else throw ParseError("train: unknown field '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ParseError("train." + key + ": wrong type");
    }
  }
  return c;
}

int reward_format(const Vocab& vocab, std::span<const TokenId> tokens) {
  return parse(vocab, tokens) ? 1 : 0;
}

int reward_accuracy(const std::optional<ParsedOutput>& parsed, int label) {
  return parsed && parsed->score == label ? 1 : 0;
}

int reward_suggestion(const std::optional<ParsedOutput>& parsed, const Action& annotated,
                      const World& world, const EnvState& state) {
  return parsed && similar(world, state, parsed->suggestion, annotated) ? 1 : 0;
}

double combine_rewards(const TrainConfig& cfg, int r_f, int r_a, int r_s) {
  return cfg.lambda_f * r_f + cfg.lambda_s * r_s + (1.0 - cfg.lambda_f - cfg.lambda_s) * r_a;
}

RewardBreakdown score_output(const TrainConfig& cfg, const Vocab& vocab,
                             std::span<const TokenId> tokens, int label, const Action& annotated,
                             const World& world, const EnvState& state) {
  const auto parsed = parse(vocab, tokens);
  RewardBreakdown b;
  b.r_f = parsed ? 1 : 0;
  b.r_a = reward_accuracy(parsed, label);
  b.r_s = reward_suggestion(parsed, annotated, world, state);
  b.r = combine_rewards(cfg, b.r_f, b.r_a, b.r_s);
  return b;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  const auto n = static_cast<double>(rewards.size());
  std::vector<double> out(rewards.size(), 0.0);
  if (rewards.empty()) return out;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  if (sd < 1e-8) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

double kl_term(double ratio) {
  if (!(ratio > 0.0)) throw std::domain_error("KL ratio must be positive");
  return ratio - std::log(ratio) - 1.0;
}

}  // namespace precritic
