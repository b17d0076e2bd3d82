// precritic: world generation, data collection, training, evaluation and
// ablation presets from one JSON config plus flag overrides.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "precritic/error.hpp"
#include "precritic/experiment.hpp"

namespace fs = std::filesystem;
using namespace precritic;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

ExperimentConfig base_config(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_experiment_config(path);
}

// Worlds from a directory of *.json files, family taken from the name prefix.
WorldSet load_world_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("--worlds: not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("--worlds: no .json files in " + dir.string());
  WorldSet set;
  for (const auto& f : files) {
    World w = load_world(f);
    const auto name = w.name();
    const auto fam = family_from_name(name.substr(0, name.find('-')));
    if (!fam) {
      throw ValidationError(f.string() + ": world name '" + name +
                            "' does not start with a family (mobile-, web-)");
    }
    set.add(std::move(w), *fam);
  }
  return set;
}

struct CriticChoice {
  std::string kind = "learned";
  std::shared_ptr<const CriticModel> model;

  CriticFn fn() const { return kind == "oracle" ? oracle_critic_fn() : learned_critic_fn(model); }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-operative GUI critic laboratory"};
  app.require_subcommand(1);

  // gen-world
  auto* gen = app.add_subcommand("gen-world", "Generate one screen-graph world");
  std::uint64_t gen_seed = 0;
  std::string gen_family = "mobile";
  std::string gen_out;
  GeneratorParams gp;
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--family", gen_family, "mobile or web")->capture_default_str();
  gen->add_option("--out", gen_out, "Output world JSON file")->required();
  gen->add_option("--screens", gp.screens, "Regular screens")->capture_default_str();
  gen->add_option("--branching", gp.branching, "Forward edges per screen")->capture_default_str();
  gen->add_option("--trap-probability", gp.trap_probability, "Chance a screen gets a trap edge")
      ->capture_default_str();
  gen->add_option("--tasks", gp.tasks, "Task count")->capture_default_str();
  gen->add_option("--destinations", gp.destinations, "Distinct goal screens")->capture_default_str();
  gen->add_option("--min-distance", gp.min_distance, "Preferred start-to-goal edges")
      ->capture_default_str();

  // collect
  auto* col = app.add_subcommand("collect", "Build D_c_action, D_c_cot and the test splits");
  std::string col_worlds, col_config, col_out;
  std::optional<std::uint64_t> col_seed;
  std::optional<std::string> col_negatives;
  std::optional<double> col_noise;
  bool col_no_filter = false, col_no_cot = false;
  col->add_option("--worlds", col_worlds, "Directory of world JSON files (default: generate from config)");
  col->add_option("--config", col_config, "Experiment config JSON");
  col->add_option("--out", col_out, "Output directory")->required();
  col->add_option("--seed", col_seed, "Master seed override");
  col->add_option("--negatives", col_negatives, "proposer or random")
      ->check(CLI::IsMember({"proposer", "random"}));
  col->add_option("--label-noise", col_noise, "Annotation flip probability");
  col->add_flag("--no-filter", col_no_filter, "Skip judge filtering (random selection instead)");
  col->add_flag("--no-cot", col_no_cot, "Skip reasoning bootstrapping");

  // train
  auto* tr = app.add_subcommand("train", "RFT cold start then S-GRPO");
  std::string tr_data, tr_config, tr_out;
  std::optional<int> tr_rft, tr_epochs, tr_group, tr_batch;
  std::optional<double> tr_ls, tr_lf, tr_lr, tr_rft_lr, tr_beta, tr_clip;
  std::optional<std::uint64_t> tr_seed;
  tr->add_option("--data", tr_data, "Collection directory")->required();
  tr->add_option("--config", tr_config, "Config JSON (default: the collection's config)");
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--rft-epochs", tr_rft, "RFT epochs (0: GRPO only)");
  tr->add_option("--epochs", tr_epochs, "S-GRPO epochs (0: RFT only)");
  tr->add_option("--lambda-s", tr_ls, "Suggestion reward weight");
  tr->add_option("--lambda-f", tr_lf, "Format reward weight");
  tr->add_option("--group-size", tr_group, "Outputs per group");
  tr->add_option("--batch-size", tr_batch, "Inputs per step");
  tr->add_option("--lr", tr_lr, "S-GRPO learning rate");
  tr->add_option("--rft-lr", tr_rft_lr, "RFT learning rate");
  tr->add_option("--beta", tr_beta, "KL weight");
  tr->add_option("--clip", tr_clip, "Ratio clip");
  tr->add_option("--seed", tr_seed, "Training seed");

  // eval
  auto* ev = app.add_subcommand("eval", "Static and dynamic evaluation");
  std::string ev_ckpt, ev_data, ev_out, ev_splits, ev_format = "csv", ev_critic = "learned";
  bool ev_dynamic = false, ev_dump = false;
  std::optional<int> ev_episodes;
  std::optional<double> ev_eta;
  ev->add_option("--checkpoint", ev_ckpt, "Checkpoint file (required for the learned critic)");
  ev->add_option("--data", ev_data, "Collection directory")->required();
  ev->add_option("--out", ev_out, "Output directory")->required();
  ev->add_option("--splits", ev_splits, "Comma-separated static splits (default: config)");
  ev->add_flag("--dynamic", ev_dynamic, "Paired baseline / pre / post episodes");
  ev->add_option("--critic", ev_critic, "learned or oracle")
      ->check(CLI::IsMember({"learned", "oracle"}))
      ->capture_default_str();
  ev->add_option("--format", ev_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  ev->add_option("--episode-seeds", ev_episodes, "Paired seeds per task");
  ev->add_option("--eta", ev_eta, "Noisy agent error rate");
  ev->add_flag("--dump-trajectories", ev_dump, "Write trajectories.jsonl");

  // ablate
  auto* ab = app.add_subcommand("ablate", "Run an ablation preset");
  std::string ab_preset, ab_config, ab_out, ab_seeds = "0";
  ab->add_option("--preset", ab_preset, "data-pipeline, rewards or sweep-lambda")
      ->required()
      ->check(CLI::IsMember({"data-pipeline", "rewards", "sweep-lambda"}));
  ab->add_option("--config", ab_config, "Experiment config JSON");
  ab->add_option("--seeds", ab_seeds, "Comma-separated master seeds")->capture_default_str();
  ab->add_option("--out", ab_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const auto fam = family_from_name(gen_family);
      if (!fam) throw UsageError("--family: expected mobile or web, got '" + gen_family + "'");
      gp.family = *fam;
      try {
        validate(gp);
      } catch (const ValidationError& e) {
        throw UsageError(e.what());
      }
      const fs::path out = gen_out;
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      save_world(generate_world(gen_seed, gp), out);
      std::cout << "wrote " << gen_out << "\n";
    } else if (*col) {
      ExperimentConfig cfg = base_config(col_config);
      if (col_seed) cfg.seed = *col_seed;
      if (col_negatives) {
        cfg.pipeline.negatives =
            *col_negatives == "random" ? NegativeStrategy::Random : NegativeStrategy::Proposer;
      }
      if (col_noise) cfg.pipeline.label_noise = *col_noise;
      if (col_no_filter) cfg.pipeline.filter = false;
      if (col_no_cot) cfg.pipeline.cot = false;
      try {
        cfg.validate();
      } catch (const ValidationError& e) {
        throw UsageError(e.what());
      }
      const WorldSet worlds = col_worlds.empty() ? build_worlds(cfg) : load_world_dir(col_worlds);
      const auto data = collect(worlds, cfg);
      write_collection(worlds, data, cfg, col_out);
      std::cout << "train " << data.train.size() << " cot " << data.cot.size() << " test-I "
                << data.test_i.size() << " test-S " << data.test_s.size() << " test-W "
                << data.test_w.size() << " -> " << col_out << "\n";
    } else if (*tr) {
      auto loaded = load_collection(tr_data);
      ExperimentConfig cfg = tr_config.empty() ? loaded.cfg : base_config(tr_config);
      auto& t = cfg.train;
      if (tr_rft) t.rft_epochs = *tr_rft;
      if (tr_epochs) t.epochs = *tr_epochs;
      if (tr_ls) t.lambda_s = *tr_ls;
      if (tr_lf) t.lambda_f = *tr_lf;
      if (tr_group) t.group_size = *tr_group;
      if (tr_batch) t.batch_size = *tr_batch;
      if (tr_lr) t.learning_rate = *tr_lr;
      if (tr_rft_lr) t.rft_learning_rate = *tr_rft_lr;
      if (tr_beta) t.beta = *tr_beta;
      if (tr_clip) t.clip = *tr_clip;
      if (tr_seed) t.seed = *tr_seed;
      try {
        cfg.validate();
      } catch (const ValidationError& e) {
        throw UsageError(e.what());
      }
      auto model = fresh_model(loaded.worlds);
      const auto result = train(model, loaded.worlds, loaded.data.train, loaded.data.cot,
                                effective_train_config(cfg));
      fs::create_directories(tr_out);
      save_checkpoint(model.policy, fs::path(tr_out) / "checkpoint.bin");
      save_checkpoint(result.reference, fs::path(tr_out) / "reference.bin");
      write_text(fs::path(tr_out) / "train_log.jsonl", training_log_jsonl(result, false));
      nlohmann::ordered_json rft = nlohmann::ordered_json::array();
      for (double l : result.rft_loss) rft.push_back(l);
      write_text(fs::path(tr_out) / "rft_loss.json", rft.dump() + "\n");
      write_text(fs::path(tr_out) / "config.json", to_json(cfg).dump(2) + "\n");
      std::cout << "rft epochs " << result.rft_loss.size() << " s-grpo epochs "
                << result.log.size() << " -> " << tr_out << "\n";
    } else if (*ev) {
      auto loaded = load_collection(ev_data);
      ExperimentConfig cfg = loaded.cfg;
      if (ev_episodes) cfg.episode_seeds = *ev_episodes;
      if (ev_eta) cfg.agent_eta = *ev_eta;
      if (!ev_splits.empty()) cfg.eval_splits = split_list(ev_splits);
      try {
        cfg.validate();
      } catch (const ValidationError& e) {
        throw UsageError(e.what());
      }
      CriticChoice critic;
      critic.kind = ev_critic;
      if (critic.kind == "learned") {
        if (ev_ckpt.empty()) throw UsageError("--checkpoint is required for --critic learned");
        auto model = fresh_model(loaded.worlds);
        model.policy = load_checkpoint(ev_ckpt, model.vocab.hash(), model.spec.hash());
        critic.model = std::make_shared<const CriticModel>(std::move(model));
      }
      const fs::path out = ev_out;
      fs::create_directories(out);
      const std::string ext = "." + ev_format;
      if (ev_dynamic) {
        const auto run = dynamic_eval(loaded.worlds, loaded.plan, critic.fn(), cfg);
        emit_report(run.reports, out / ("dynamic" + ext), ev_format);
        if (ev_dump) {
          std::string lines;
          for (const auto& row : run.rows) {
            lines += episode_to_json(loaded.worlds.get(row.world), row).dump() + "\n";
          }
          write_text(out / "trajectories.jsonl", lines);
        }
        std::cout << format_reports(run.reports, "csv");
      } else {
        const auto reports = static_reports(loaded.worlds, loaded.data, critic.fn(), cfg.eval_splits);
        emit_report(reports, out / ("static" + ext), ev_format);
        std::cout << format_reports(reports, "csv");
      }
    } else if (*ab) {
      const ExperimentConfig cfg = base_config(ab_config);
      std::vector<std::uint64_t> seeds;
      for (const auto& s : split_list(ab_seeds)) {
        try {
          seeds.push_back(std::stoull(s));
        } catch (const std::exception&) {
          throw UsageError("--seeds: not an integer: '" + s + "'");
        }
      }
      if (seeds.empty()) throw UsageError("--seeds: empty list");
      const auto variants = ablation_variants(ab_preset, cfg);
      const auto rows = run_ablation(variants, seeds);
      const fs::path out = ab_out;
      write_text(out / "ablation.csv", ablation_csv(rows));
      write_text(out / "ablation.json", ablation_json(variants, rows));
      std::cout << ablation_csv(rows);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
