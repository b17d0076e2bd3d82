#include <filesystem>

#include "doctest.h"
#include "precritic/error.hpp"
#include "precritic/experiment.hpp"

using namespace precritic;
using nlohmann::json;

namespace {

ExperimentConfig small() {
  ExperimentConfig cfg;
  cfg.seed = 8;
  cfg.mobile.count = 3;
  cfg.mobile.params.tasks = 4;
  return cfg;
}

// JSON pointers of leaves that differ between two documents.
std::vector<std::string> changed_leaves(const json& a, const json& b) {
  std::vector<std::string> out;
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  for (const auto& [k, v] : fa.items()) {
    if (!fb.contains(k) || fb.at(k) != v) out.push_back(k);
  }
  for (const auto& [k, v] : fb.items()) {
    if (!fa.contains(k)) out.push_back(k);
  }
  return out;
}

}  // namespace

TEST_CASE("experiment config survives a JSON round trip") {
  auto cfg = small();
  cfg.mobile.params.min_distance = 3;
  cfg.web.params.branching = 3;
  cfg.pipeline.filter = false;
  cfg.train.lambda_s = 0.2;
  cfg.eval_splits = {"test-I"};
  cfg.ear_include_failures = false;
  const auto j = to_json(cfg);
  const auto back = experiment_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.mobile.params.min_distance == 3);

  CHECK_THROWS_AS(experiment_config_from_json(json{{"sead", 1}}), ParseError);
  CHECK_THROWS_AS(experiment_config_from_json(json{{"worlds", {{"mobile", {{"count", "x"}}}}}}),
                  ParseError);
  // Missing fields keep their defaults.
  const auto partial = experiment_config_from_json(json{{"seed", 4}});
  CHECK(partial.seed == 4);
  CHECK(to_json(partial)["train"] == to_json(ExperimentConfig{})["train"]);
}

TEST_CASE("worlds are named by family and index and follow the master seed") {
  const auto cfg = small();
  const auto a = build_worlds(cfg);
  REQUIRE(a.size() == 4);
  CHECK(a.entries()[0].world.name() == "mobile-00");
  CHECK(a.entries()[2].world.name() == "mobile-02");
  CHECK(a.entries()[3].world.name() == "web-00");
  CHECK(a.entries()[3].family == Family::Web);
  const auto b = build_worlds(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(world_to_json(a.entries()[i].world) == world_to_json(b.entries()[i].world));
  }
  auto other = cfg;
  other.seed = 9;
  CHECK(world_to_json(build_worlds(other).entries()[0].world) !=
        world_to_json(a.entries()[0].world));
}

TEST_CASE("every ablation variant changes exactly its one flag") {
  const auto base = small();
  const auto base_json = to_json(base);
  for (const std::string preset : {"data-pipeline", "rewards", "sweep-lambda"}) {
    CAPTURE(preset);
    const auto variants = ablation_variants(preset, base);
    REQUIRE(variants.size() >= 4);
    for (const auto& v : variants) {
      CAPTURE(v.name);
      const auto diff = changed_leaves(base_json, to_json(v.cfg));
      if (v.flag.empty()) {
        CHECK(diff.empty());
        continue;
      }
      // The field named by the flag, with any "=value" suffix dropped.
      auto field = "/" + v.flag.substr(0, v.flag.find('='));
      std::replace(field.begin(), field.end(), '.', '/');
      CHECK(diff.size() <= 1);
      for (const auto& d : diff) CHECK(d == field);
    }
  }
  const auto table3 = ablation_variants("data-pipeline", base);
  CHECK(table3[1].name == "w/o NOS");
  CHECK(table3[1].cfg.pipeline.negatives == NegativeStrategy::Random);
  CHECK(table3[2].name == "w/o DF");
  CHECK_FALSE(table3[2].cfg.pipeline.filter);
  CHECK(table3[3].name == "w/o GCG");
  CHECK_FALSE(table3[3].cfg.pipeline.cot);
  CHECK_THROWS_AS(ablation_variants("bogus", base), ValidationError);
}

TEST_CASE("a collection written to disk loads back identically") {
  const auto cfg = small();
  const auto worlds = build_worlds(cfg);
  const auto data = collect(worlds, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "precritic_test_collection";
  std::filesystem::remove_all(dir);
  write_collection(worlds, data, cfg, dir);
  const auto loaded = load_collection(dir);
  CHECK(to_json(loaded.cfg) == to_json(cfg));
  REQUIRE(loaded.worlds.size() == worlds.size());
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    CHECK(world_to_json(loaded.worlds.entries()[i].world) ==
          world_to_json(worlds.entries()[i].world));
    CHECK(loaded.worlds.entries()[i].family == worlds.entries()[i].family);
  }
  const auto plan = plan_splits(worlds, cfg.pipeline);
  CHECK(loaded.plan.train == plan.train);
  CHECK(loaded.plan.test_i == plan.test_i);
  CHECK(loaded.plan.test_s == plan.test_s);
  CHECK(loaded.plan.test_w == plan.test_w);
  CHECK(dataset_to_jsonl(loaded.data.train) == dataset_to_jsonl(data.train));
  CHECK(dataset_to_jsonl(loaded.data.cot) == dataset_to_jsonl(data.cot));
  CHECK(dataset_to_jsonl(loaded.data.test_i) == dataset_to_jsonl(data.test_i));
  CHECK(dataset_to_jsonl(loaded.data.test_s) == dataset_to_jsonl(data.test_s));
  CHECK(dataset_to_jsonl(loaded.data.test_w) == dataset_to_jsonl(data.test_w));
  std::filesystem::remove_all(dir);
}
