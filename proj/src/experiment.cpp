#include "precritic/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "precritic/error.hpp"

namespace precritic {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (mobile.count < 1) throw ValidationError("worlds.mobile.count must be >= 1");
  if (web.count < 1) throw ValidationError("worlds.web.count must be >= 1");
  precritic::validate(mobile.params);
  precritic::validate(web.params);
  pipeline.validate();
  train.validate();
  for (const auto& s : eval_splits) {
    if (!split_from_name(s)) throw ValidationError("eval.splits: unknown split '" + s + "'");
  }
  if (!(agent_eta >= 0.0 && agent_eta < 1.0)) throw ValidationError("eval.agent_eta must be in [0, 1)");
  if (episode_seeds < 1) throw ValidationError("eval.episode_seeds must be >= 1");
}

namespace {

json family_json(const WorldFamilyConfig& f) {
  return {{"count", f.count},
          {"screens", f.params.screens},
          {"branching", f.params.branching},
          {"trap_probability", f.params.trap_probability},
          {"tasks", f.params.tasks},
          {"destinations", f.params.destinations},
          {"min_distance", f.params.min_distance}};
}

template <typename T>
T field(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": wrong type");
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected object");
}

WorldFamilyConfig family_from_json(const json& j, WorldFamilyConfig f, const std::string& where) {
  require_object(j, where);
  for (const auto& [key, v] : j.items()) {
    const auto at = where + "." + key;
    if (key == "count") f.count = field<int>(v, at);
    else if (key == "screens") f.params.screens = field<int>(v, at);
    else if (key == "branching") f.params.branching = field<int>(v, at);
    else if (key == "trap_probability") f.params.trap_probability = field<double>(v, at);
    else if (key == "tasks") f.params.tasks = field<int>(v, at);
    else if (key == "destinations") f.params.destinations = field<int>(v, at);
    else if (key == "min_distance") f.params.min_distance = field<int>(v, at);
    else throw ParseError(where + ": unknown field '" + key + "'");
  }
  return f;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return {{"seed", c.seed},
          {"worlds", {{"mobile", family_json(c.mobile)}, {"web", family_json(c.web)}}},
          {"pipeline", to_json(c.pipeline)},
          {"train", to_json(c.train)},
          {"eval",
           {{"splits", c.eval_splits},
            {"agent_eta", c.agent_eta},
            {"episode_seeds", c.episode_seeds},
            {"ear_include_failures", c.ear_include_failures}}},
          {"out", c.out.string()}};
}

ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig c) {
  require_object(j, "config");
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      c.seed = field<std::uint64_t>(v, "seed");
    } else if (key == "worlds") {
      require_object(v, "worlds");
      for (const auto& [fam, fv] : v.items()) {
        if (fam == "mobile") c.mobile = family_from_json(fv, c.mobile, "worlds.mobile");
        else if (fam == "web") c.web = family_from_json(fv, c.web, "worlds.web");
        else throw ParseError("worlds: unknown family '" + fam + "'");
      }
    } else if (key == "pipeline") {
      c.pipeline = pipeline_config_from_json(v, c.pipeline);
    } else if (key == "train") {
      c.train = train_config_from_json(v, c.train);
    } else if (key == "eval") {
      require_object(v, "eval");
      for (const auto& [ek, ev] : v.items()) {
        const auto at = "eval." + ek;
        if (ek == "splits") c.eval_splits = field<std::vector<std::string>>(ev, at);
        else if (ek == "agent_eta") c.agent_eta = field<double>(ev, at);
        else if (ek == "episode_seeds") c.episode_seeds = field<int>(ev, at);
        else if (ek == "ear_include_failures") c.ear_include_failures = field<bool>(ev, at);
        else throw ParseError("eval: unknown field '" + ek + "'");
      }
    } else if (key == "out") {
      c.out = field<std::string>(v, "out");
    } else {
      throw ParseError("config: unknown field '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

namespace {

std::string world_label(Family family, int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-%02d", k);
  return std::string(family_name(family)) + buf;
}

void add_family(WorldSet& set, const WorldFamilyConfig& f, std::uint64_t master) {
  for (int k = 0; k < f.count; ++k) {
    const auto seed = derive_seed(master, {stable_hash(family_name(f.params.family)),
                                           static_cast<std::uint64_t>(k)});
    World w = generate_world(seed, f.params);
    w.set_name(world_label(f.params.family, k));
    set.add(std::move(w), f.params.family);
  }
}

}  // namespace

WorldSet build_worlds(const ExperimentConfig& cfg) {
  auto mobile = cfg.mobile;
  auto web = cfg.web;
  mobile.params.family = Family::Mobile;
  web.params.family = Family::Web;
  WorldSet set;
  add_family(set, mobile, cfg.seed);
  add_family(set, web, cfg.seed);
  return set;
}

CollectedData collect(const WorldSet& worlds, const ExperimentConfig& cfg) {
  const auto plan = plan_splits(worlds, cfg.pipeline);
  return make_splits(worlds, plan, cfg.pipeline, derive_seed(cfg.seed, {stable_hash("pipeline")}));
}

CriticModel fresh_model(const WorldSet& worlds) {
  const auto ptrs = worlds.pointers();
  return CriticModel::zero(Vocab::from_worlds(ptrs));
}

TrainConfig effective_train_config(const ExperimentConfig& cfg) {
  TrainConfig t = cfg.train;
  t.seed = derive_seed(cfg.seed, {stable_hash("train"), cfg.train.seed});
  return t;
}

std::vector<StaticReport> static_reports(const WorldSet& worlds, const CollectedData& data,
                                         const CriticFn& critic,
                                         const std::vector<std::string>& splits) {
  std::vector<StaticReport> out;
  for (const auto& name : splits) {
    const auto split = split_from_name(name);
    if (!split) throw ValidationError("unknown split '" + name + "'");
    out.push_back(static_report(worlds, data.split(*split), critic, name));
  }
  return out;
}

DynamicRun dynamic_eval(const WorldSet& worlds, const SplitPlan& plan, const CriticFn& critic,
                        const ExperimentConfig& cfg) {
  std::vector<TaskRef> tasks;
  for (const auto* list : {&plan.train, &plan.test_i}) {
    for (const auto& [w, t] : *list) tasks.push_back({w, t});
  }
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < cfg.episode_seeds; ++k) {
    seeds.push_back(derive_seed(cfg.seed, {stable_hash("episodes"), static_cast<std::uint64_t>(k)}));
  }
  const std::vector<SuiteConfig> configs = {
      {"baseline", CriticMode::None, {}},
      {"pre-critic", CriticMode::Pre, critic},
      {"post-critic", CriticMode::Post, critic},
  };
  DynamicRun run;
  run.rows = run_suite(worlds, tasks, AgentPolicy::noisy(cfg.agent_eta), configs, seeds);
  run.reports = dynamic_reports(run.rows, "baseline", cfg.ear_include_failures);
  return run;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunArtifacts a;
  a.worlds = build_worlds(cfg);
  a.plan = plan_splits(a.worlds, cfg.pipeline);
  a.data = make_splits(a.worlds, a.plan, cfg.pipeline,
                       derive_seed(cfg.seed, {stable_hash("pipeline")}));
  a.model = std::make_shared<CriticModel>(fresh_model(a.worlds));
  a.training = train(*a.model, a.worlds, a.data.train, a.data.cot, effective_train_config(cfg));
  a.static_reports = static_reports(a.worlds, a.data, learned_critic_fn(a.model), cfg.eval_splits);
  auto ref = std::make_shared<CriticModel>(a.model->vocab, a.model->spec, a.training.reference);
  a.reference_reports = static_reports(a.worlds, a.data, learned_critic_fn(ref), cfg.eval_splits);
  return a;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

json plan_json(const std::vector<TaskKey>& keys) {
  json arr = json::array();
  for (const auto& [w, t] : keys) arr.push_back({w, t});
  return arr;
}

std::vector<TaskKey> plan_from_json(const json& j) {
  std::vector<TaskKey> out;
  for (const auto& e : j) out.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::size_t>());
  return out;
}

const char* const kSplitFiles[] = {"train.jsonl", "test-I.jsonl", "test-S.jsonl", "test-W.jsonl"};

}  // namespace

void write_collection(const WorldSet& worlds, const CollectedData& data,
                      const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "worlds");
  json world_list = json::array();
  for (const auto& e : worlds.entries()) {
    const auto file = "worlds/" + e.world.name() + ".json";
    save_world(e.world, dir / file);
    world_list.push_back({{"name", e.world.name()},
                          {"family", family_name(e.family)},
                          {"file", file}});
  }
  const Dataset* splits[] = {&data.train, &data.test_i, &data.test_s, &data.test_w};
  json files = json::object();
  for (int i = 0; i < 4; ++i) {
    write_jsonl(*splits[i], dir / kSplitFiles[i]);
    files[split_name(static_cast<Split>(i))] = {{"file", kSplitFiles[i]},
                                                {"provenance", splits[i]->provenance}};
  }
  write_jsonl(data.cot, dir / "d_c_cot.jsonl");
  files["d_c_cot"] = {{"file", "d_c_cot.jsonl"}, {"provenance", data.cot.provenance}};

  const auto plan = plan_splits(worlds, cfg.pipeline);
  json manifest = {{"config", to_json(cfg)},
                   {"worlds", world_list},
                   {"plan",
                    {{"train", plan_json(plan.train)},
                     {"test-I", plan_json(plan.test_i)},
                     {"test-S", plan_json(plan.test_s)},
                     {"test-W", plan_json(plan.test_w)}}},
                   {"datasets", files}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedCollection load_collection(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  json m;
  try {
    m = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  LoadedCollection c;
  try {
    c.cfg = experiment_config_from_json(m.at("config"));
    for (const auto& w : m.at("worlds")) {
      const auto fam = family_from_name(w.at("family").get<std::string>());
      if (!fam) throw ParseError(path.string() + ": unknown family");
      c.worlds.add(load_world(dir / w.at("file").get<std::string>()), *fam);
    }
    const auto& p = m.at("plan");
    c.plan.train = plan_from_json(p.at("train"));
    c.plan.test_i = plan_from_json(p.at("test-I"));
    c.plan.test_s = plan_from_json(p.at("test-S"));
    c.plan.test_w = plan_from_json(p.at("test-W"));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  c.plan.validate();
  Dataset* splits[] = {&c.data.train, &c.data.test_i, &c.data.test_s, &c.data.test_w};
  for (int i = 0; i < 4; ++i) *splits[i] = read_jsonl(dir / kSplitFiles[i], c.worlds);
  c.data.cot = read_jsonl(dir / "d_c_cot.jsonl", c.worlds);
  return c;
}

std::vector<AblationVariant> ablation_variants(const std::string& preset,
                                               const ExperimentConfig& base) {
  std::vector<AblationVariant> out{{"full", "", base}};
  auto add = [&](std::string name, std::string flag, auto edit) {
    ExperimentConfig c = base;
    edit(c);
    out.push_back({std::move(name), std::move(flag), std::move(c)});
  };
  if (preset == "data-pipeline") {
    add("w/o NOS", "pipeline.negatives=random",
        [](ExperimentConfig& c) { c.pipeline.negatives = NegativeStrategy::Random; });
    add("w/o DF", "pipeline.filter=false", [](ExperimentConfig& c) { c.pipeline.filter = false; });
    add("w/o GCG", "pipeline.cot=false", [](ExperimentConfig& c) { c.pipeline.cot = false; });
  } else if (preset == "rewards") {
    add("rft-only", "train.epochs=0", [](ExperimentConfig& c) { c.train.epochs = 0; });
    add("w/o RFT", "train.rft_epochs=0", [](ExperimentConfig& c) { c.train.rft_epochs = 0; });
    add("w/o r_s", "train.lambda_s=0", [](ExperimentConfig& c) { c.train.lambda_s = 0.0; });
    add("w/o r_f", "train.lambda_f=0", [](ExperimentConfig& c) { c.train.lambda_f = 0.0; });
  } else if (preset == "sweep-lambda") {
    out.clear();
    for (double ls : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      std::ostringstream name;
      name << "lambda_s=" << ls;
      add(name.str(), "train.lambda_s", [ls](ExperimentConfig& c) { c.train.lambda_s = ls; });
    }
    for (int g : {2, 4, 6, 8}) {
      add("G=" + std::to_string(g), "train.group_size",
          [g](ExperimentConfig& c) { c.train.group_size = g; });
    }
  } else {
    throw ValidationError("unknown ablation preset '" + preset +
                          "' (expected data-pipeline, rewards or sweep-lambda)");
  }
  return out;
}

std::vector<AblationRow> run_ablation(const std::vector<AblationVariant>& variants,
                                      const std::vector<std::uint64_t>& seeds) {
  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    for (auto seed : seeds) {
      ExperimentConfig cfg = v.cfg;
      cfg.seed = seed;
      const auto a = run_experiment(cfg);
      for (const auto& r : a.static_reports) rows.push_back({v.name, seed, r});
    }
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "variant,seed,split,critic_acc,sugg_acc,n\n";
  for (const auto& r : rows) {
    out += r.variant + "," + std::to_string(r.seed) + "," + r.report.split + "," +
           json(r.report.critic_acc).dump() + "," + json(r.report.sugg_acc).dump() + "," +
           std::to_string(r.report.n) + "\n";
  }
  return out;
}

std::string ablation_json(const std::vector<AblationVariant>& variants,
                          const std::vector<AblationRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& v : variants) {
    nlohmann::ordered_json j;
    j["variant"] = v.name;
    j["flag"] = v.flag;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      if (r.variant != v.name) continue;
      per.push_back({{"seed", r.seed},
                     {"split", r.report.split},
                     {"critic_acc", r.report.critic_acc},
                     {"sugg_acc", r.report.sugg_acc},
                     {"n", r.report.n}});
    }
    j["results"] = std::move(per);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace precritic
