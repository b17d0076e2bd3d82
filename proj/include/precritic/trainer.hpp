#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "precritic/critic.hpp"
#include "precritic/dataset.hpp"
#include "precritic/grpo.hpp"
#include "precritic/kernels.hpp"
#include "precritic/train_config.hpp"

namespace precritic {

// Teacher-forcing targets: D_c_action samples encode (l, s) without thinking,
// D_c_cot samples encode (t, l, s).
std::vector<RftTarget> rft_targets(const CriticModel& model, const WorldSet& worlds,
                                   const Dataset& action_data, const Dataset& cot_data);

// One descent step on the batch's mean negative log-likelihood. Returns the
// loss before the step. Throws TrainingError on a non-finite loss or update.
double rft_step(CriticPolicy& policy, std::span<const RftTarget> batch, double learning_rate);

std::vector<GrpoInput> grpo_inputs(const CriticModel& model, const WorldSet& worlds,
                                   const Dataset& action_data);

struct SgrpoStats {
  double objective = 0.0;  // mean over groups and outputs
  double mean_r = 0.0, mean_r_f = 0.0, mean_r_a = 0.0, mean_r_s = 0.0, mean_kl = 0.0;
  std::size_t outputs = 0;
  std::vector<GroupResult> groups;  // per input, in batch order
};

// Samples a group per input from a frozen copy of `policy`, then takes one
// ascent step of size cfg.learning_rate on the mean clipped surrogate minus
// beta * KL to `ref`. Group i draws from derive_seed(seed, {i}).
SgrpoStats sgrpo_step(CriticPolicy& policy, const CriticPolicy& ref, const Vocab& vocab,
                      std::span<const GrpoInput> batch, const TrainConfig& cfg,
                      std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double mean_r = 0.0, mean_r_f = 0.0, mean_r_a = 0.0, mean_r_s = 0.0, mean_kl = 0.0;
  double wall_ms = 0.0;
};

nlohmann::ordered_json to_json(const EpochRecord& r, bool with_wall = true);

struct TrainResult {
  std::vector<double> rft_loss;    // mean loss per RFT epoch
  std::vector<EpochRecord> log;    // one record per S-GRPO epoch
  CriticPolicy reference;          // snapshot after RFT
};

// RFT epochs over D_c_action and D_c_cot, snapshot as reference, then S-GRPO
// epochs over D_c_action. Updates model.policy in place.
TrainResult train(CriticModel& model, const WorldSet& worlds, const Dataset& action_data,
                  const Dataset& cot_data, const TrainConfig& cfg);

// JSON lines, one S-GRPO epoch per line.
std::string training_log_jsonl(const TrainResult& result, bool with_wall = true);

}  // namespace precritic
