#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "precritic/metrics.hpp"
#include "precritic/pipeline.hpp"
#include "precritic/trainer.hpp"
#include "precritic/world_gen.hpp"

namespace precritic {

struct WorldFamilyConfig {
  int count = 0;
  GeneratorParams params;
};

// Experiment schedule: five RFT epochs, then S-GRPO at lr 0.3 over batches of 4.
inline TrainConfig experiment_train_config() {
  TrainConfig t;
  t.rft_epochs = 5;
  t.epochs = 15;
  t.learning_rate = 0.3;
  t.batch_size = 4;
  return t;
}

struct ExperimentConfig {
  std::uint64_t seed = 0;
  WorldFamilyConfig mobile{11, {30, 3, 0.3, 24, 3, Family::Mobile, 6}};
  WorldFamilyConfig web{1, {30, 3, 0.3, 8, 3, Family::Web, 6}};
  PipelineConfig pipeline;
  TrainConfig train = experiment_train_config();
  std::vector<std::string> eval_splits = {"test-I", "test-S", "test-W"};
  double agent_eta = 0.3;
  int episode_seeds = 3;
  bool ear_include_failures = true;
  std::filesystem::path out = "out";

  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Missing fields keep defaults; unknown fields throw ParseError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Worlds "mobile-00", "mobile-01", ..., "web-00", each generated from a seed
// derived from the master seed.
WorldSet build_worlds(const ExperimentConfig& cfg);

CollectedData collect(const WorldSet& worlds, const ExperimentConfig& cfg);

CriticModel fresh_model(const WorldSet& worlds);

// cfg.train with its seed derived from the master seed.
TrainConfig effective_train_config(const ExperimentConfig& cfg);

std::vector<StaticReport> static_reports(const WorldSet& worlds, const CollectedData& data,
                                         const CriticFn& critic,
                                         const std::vector<std::string>& splits);

struct DynamicRun {
  std::vector<SuiteRow> rows;
  std::vector<DynamicReport> reports;
};

// Noisy-optimal agent on the train and test-I tasks: baseline, pre-critic
// and post-critic with `critic`, paired over cfg.episode_seeds seeds.
DynamicRun dynamic_eval(const WorldSet& worlds, const SplitPlan& plan, const CriticFn& critic,
                        const ExperimentConfig& cfg);

// Everything one master seed determines, kept in memory.
struct RunArtifacts {
  WorldSet worlds;
  SplitPlan plan;
  CollectedData data;
  std::shared_ptr<CriticModel> model;
  TrainResult training;
  std::vector<StaticReport> static_reports;
  std::vector<StaticReport> reference_reports;  // post-RFT snapshot
};

RunArtifacts run_experiment(const ExperimentConfig& cfg);

// Writes worlds/, the split files, d_c_cot.jsonl and manifest.json.
void write_collection(const WorldSet& worlds, const CollectedData& data,
                      const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct LoadedCollection {
  ExperimentConfig cfg;
  WorldSet worlds;
  SplitPlan plan;
  CollectedData data;
};

LoadedCollection load_collection(const std::filesystem::path& dir);

struct AblationVariant {
  std::string name;
  std::string flag;  // the single changed field, "" for the reference run
  ExperimentConfig cfg;
};

// Presets: data-pipeline, rewards, sweep-lambda. Throws ValidationError for
// an unknown preset.
std::vector<AblationVariant> ablation_variants(const std::string& preset,
                                               const ExperimentConfig& base);

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  StaticReport report;
};

std::vector<AblationRow> run_ablation(const std::vector<AblationVariant>& variants,
                                      const std::vector<std::uint64_t>& seeds);

std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_json(const std::vector<AblationVariant>& variants,
                          const std::vector<AblationRow>& rows);

}  // namespace precritic
