#pragma once

#include <cstdint>

#include "json.hpp"

namespace precritic {

struct TrainConfig {
  double lambda_f = 0.1;  // format reward weight
  double lambda_s = 0.1;  // suggestion reward weight
  int group_size = 6;
  double clip = 0.2;
  double beta = 1e-2;  // KL coefficient
  double learning_rate = 1e-2;  // S-GRPO ascent step
  double rft_learning_rate = 0.5;  // cold-start descent step
  int batch_size = 32;
  int epochs = 10;  // S-GRPO epochs
  int rft_epochs = 1;
  std::uint64_t seed = 0;
  int max_len = 12;  // sampling cap per output

  // Throws ValidationError naming the violated constraint.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
// Missing fields keep their defaults; unknown fields are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace precritic
