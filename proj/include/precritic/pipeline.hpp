#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "precritic/agent.hpp"
#include "precritic/critic.hpp"
#include "precritic/dataset.hpp"

namespace precritic {

enum class NegativeStrategy {
  Proposer,  // the fallible agent proposes, the optimality rule keeps its mistakes
  Random,    // random decision replacement: any non-optimal template of the world
};

struct PipelineConfig {
  NegativeStrategy negatives = NegativeStrategy::Proposer;
  int neg_ratio = 1;  // proposer draws per state
  bool filter = true;  // off: random selection at the filter's expected retention
  double label_noise = 0.2;
  double judge_error = 0.1;
  bool cot = true;  // build D_c_cot by reasoning bootstrapping
  int bootstrap_max = 3;
  double bootstrap_epsilon = 0.5;
  double train_fraction = 0.75;  // tasks per seen world that go to train
  int scenario_holdout = 1;      // mobile worlds reserved for test-S

  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {});

// One sample per step of the shortest trajectory that always takes the
// smallest optimal action, Done included. Throws ValidationError when a goal
// is unreachable.
std::vector<Sample> collect_positives(const World& world, const std::vector<std::size_t>& tasks);

// The proposer draws one action per state; actions off every shortest path
// are kept as negatives. `suggestions[i]` annotates `states[i]`.
std::vector<Sample> sample_negatives(const World& world, const std::vector<EnvState>& states,
                                     const std::vector<Action>& suggestions,
                                     const AgentPolicy& proposer, Rng& rng, int draws = 1);

// Replaces the decision at each state with a uniformly drawn non-optimal
// action template of the world (not necessarily available on the screen).
std::vector<Sample> random_negatives(const World& world, const std::vector<EnvState>& states,
                                     const std::vector<Action>& suggestions, Rng& rng,
                                     int draws = 1);

// Flips each label with probability label_noise, then keeps samples whose
// label agrees with the judge's score.
std::vector<Sample> filter_samples(const WorldSet& worlds, std::vector<Sample> samples,
                                   const StochasticCriticFn& judge, double label_noise, Rng& rng);

struct BootstrapStats {
  std::size_t tries = 0;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

// Up to max_tries label-blind generations per sample; the first whose score
// and suggestion equal the annotation is kept with its thinking.
Dataset bootstrap_cot(const WorldSet& worlds, const std::vector<Sample>& samples,
                      const StochasticCriticFn& generator, int max_tries, Rng& rng,
                      BootstrapStats* stats = nullptr);

using TaskKey = std::pair<std::string, std::size_t>;  // world name, task index

struct SplitPlan {
  std::vector<TaskKey> train, test_i, test_s, test_w;

  // Throws ValidationError when a task appears in two splits.
  void validate() const;
};

// Mobile worlds in insertion order; the last `scenario_holdout` go to test-S,
// the others split their tasks between train and test-I. Web worlds go to
// test-W. Throws ValidationError naming a missing family.
SplitPlan plan_splits(const WorldSet& worlds, const PipelineConfig& cfg);

struct CollectedData {
  Dataset train;  // D_c_action
  Dataset cot;    // D_c_cot (empty when cot is off)
  Dataset test_i, test_s, test_w;
  BootstrapStats bootstrap;

  const Dataset& split(Split s) const;
};

// Full collection. The train split runs negatives, filtering and
// bootstrapping per the config; test splits are clean (oracle labels,
// proposer negatives) and do not depend on the ablation flags.
CollectedData make_splits(const WorldSet& worlds, const SplitPlan& plan, const PipelineConfig& cfg,
                          std::uint64_t seed);

}  // namespace precritic
