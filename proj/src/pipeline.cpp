#include "precritic/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "precritic/error.hpp"
#include "precritic/oracle.hpp"

namespace precritic {

void PipelineConfig::validate() const {
  if (neg_ratio < 1) throw ValidationError("neg_ratio must be >= 1");
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw ValidationError("label_noise must be in [0, 0.5)");
  }
  if (!(judge_error >= 0.0 && judge_error < 0.5)) {
    throw ValidationError("judge_error must be in [0, 0.5)");
  }
  if (bootstrap_max < 1) throw ValidationError("bootstrap_max must be >= 1");
  if (!(bootstrap_epsilon >= 0.0 && bootstrap_epsilon <= 1.0)) {
    throw ValidationError("bootstrap_epsilon must be in [0, 1]");
  }
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ValidationError("train_fraction must be in (0, 1]");
  }
  if (scenario_holdout < 1) throw ValidationError("scenario_holdout must be >= 1");
}

nlohmann::json to_json(const PipelineConfig& c) {
  return {{"negatives", c.negatives == NegativeStrategy::Proposer ? "proposer" : "random"},
          {"neg_ratio", c.neg_ratio},
          {"filter", c.filter},
          {"label_noise", c.label_noise},
          {"judge_error", c.judge_error},
          {"cot", c.cot},
          {"bootstrap_max", c.bootstrap_max},
          {"bootstrap_epsilon", c.bootstrap_epsilon},
          {"train_fraction", c.train_fraction},
          {"scenario_holdout", c.scenario_holdout}};
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig c) {
  if (!j.is_object()) throw ParseError("pipeline: expected object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "negatives") {
        const auto s = v.get<std::string>();
        if (s == "proposer") c.negatives = NegativeStrategy::Proposer;
        else if (s == "random") c.negatives = NegativeStrategy::Random;
        else throw ParseError("pipeline.negatives: expected 'proposer' or 'random', got '" + s + "'");
      } else if (key == "neg_ratio") c.neg_ratio = v.get<int>();
      else if (key == "filter") c.filter = v.get<bool>();
      else if (key == "label_noise") c.label_noise = v.get<double>();
      else if (key == "judge_error") c.judge_error = v.get<double>();
      else if (key == "cot") c.cot = v.get<bool>();
      else if (key == "bootstrap_max") c.bootstrap_max = v.get<int>();
      else if (key == "bootstrap_epsilon") c.bootstrap_epsilon = v.get<double>();
      else if (key == "train_fraction") c.train_fraction = v.get<double>();
      else if (key == "scenario_holdout") c.scenario_holdout = v.get<int>();
      else throw ParseError("pipeline: unknown field '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ParseError("pipeline." + key + ": wrong type");
    }
  }
  return c;
}

namespace {

Sample make_sample(const World& world, const EnvState& state, const Action& action, int label,
                   const Action& suggestion) {
  Sample s;
  s.world = world.name();
  s.task = world.tasks().at(state.task).id;
  s.screen = world.screen(state.screen).id;
  s.state = state;
  s.action = action;
  s.label = label;
  s.suggestion = suggestion;
  return s;
}

bool contains(const std::vector<Action>& sorted, const Action& a) {
  return std::binary_search(sorted.begin(), sorted.end(), a);
}

std::vector<Action> world_templates(const World& world) {
  std::set<Action> all{Action::done()};
  for (const auto& e : world.edges()) all.insert(e.action);
  return {all.begin(), all.end()};
}

void check_parallel(const std::vector<EnvState>& states, const std::vector<Action>& suggestions) {
  if (states.size() != suggestions.size()) {
    throw std::invalid_argument("states and suggestions differ in length");
  }
}

}  // namespace

std::vector<Sample> collect_positives(const World& world, const std::vector<std::size_t>& tasks) {
  std::vector<Sample> out;
  for (auto t : tasks) {
    EnvState state = initial_state(world, t);
    if (!distance_to_goal(world, state)) {
      throw ValidationError("task '" + world.tasks().at(t).id + "' in world '" + world.name() +
                            "': goal unreachable");
    }
    while (!state.terminal) {
      const Action a = optimal_actions(world, state).front();
      out.push_back(make_sample(world, state, a, 1, a));
      state = step(world, state, a).state;
    }
  }
  return out;
}

std::vector<Sample> sample_negatives(const World& world, const std::vector<EnvState>& states,
                                     const std::vector<Action>& suggestions,
                                     const AgentPolicy& proposer, Rng& rng, int draws) {
  check_parallel(states, suggestions);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto optimal = optimal_actions(world, states[i]);
    std::set<Action> seen;
    for (int d = 0; d < draws; ++d) {
      const Action a = proposer.decide(world, states[i], rng);
      if (contains(optimal, a) || !seen.insert(a).second) continue;
      out.push_back(make_sample(world, states[i], a, 0, suggestions[i]));
    }
  }
  return out;
}

std::vector<Sample> random_negatives(const World& world, const std::vector<EnvState>& states,
                                     const std::vector<Action>& suggestions, Rng& rng, int draws) {
  check_parallel(states, suggestions);
  const auto templates = world_templates(world);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto optimal = optimal_actions(world, states[i]);
    std::vector<Action> pool;
    for (const auto& a : templates) {
      if (!contains(optimal, a)) pool.push_back(a);
    }
    if (pool.empty()) continue;
    std::set<Action> seen;
    for (int d = 0; d < draws; ++d) {
      const Action& a = pool[uniform_index(rng, pool.size())];
      if (!seen.insert(a).second) continue;
      out.push_back(make_sample(world, states[i], a, 0, suggestions[i]));
    }
  }
  return out;
}

namespace {
void apply_label_noise(std::vector<Sample>& samples, double label_noise, Rng& rng) {
  for (auto& s : samples) {
    if (bernoulli(rng, label_noise)) s.label = 1 - s.label;
  }
}
}  // namespace

std::vector<Sample> filter_samples(const WorldSet& worlds, std::vector<Sample> samples,
                                   const StochasticCriticFn& judge, double label_noise, Rng& rng) {
  apply_label_noise(samples, label_noise, rng);
  std::vector<Sample> kept;
  for (auto& s : samples) {
    const auto verdict = judge(worlds.get(s.world), s.state, s.action, rng);
    if (verdict && verdict->score == s.label) kept.push_back(std::move(s));
  }
  return kept;
}

Dataset bootstrap_cot(const WorldSet& worlds, const std::vector<Sample>& samples,
                      const StochasticCriticFn& generator, int max_tries, Rng& rng,
                      BootstrapStats* stats) {
  if (max_tries < 1) throw std::invalid_argument("bootstrap max must be >= 1");
  BootstrapStats local;
  Dataset out;
  for (const auto& s : samples) {
    const World& world = worlds.get(s.world);
    bool kept = false;
    for (int t = 0; t < max_tries && !kept; ++t) {
      ++local.tries;
      // The generator sees only (state, action).
      const auto gen = generator(world, s.state, s.action, rng);
      if (gen && gen->thinking && gen->score == s.label && gen->suggestion == s.suggestion) {
        Sample rec = s;
        rec.thinking = gen->thinking;
        out.samples.push_back(std::move(rec));
        kept = true;
      }
    }
    ++(kept ? local.kept : local.dropped);
  }
  if (stats) *stats = local;
  return out;
}

void SplitPlan::validate() const {
  std::map<TaskKey, std::string_view> owner;
  const std::pair<const std::vector<TaskKey>*, std::string_view> lists[] = {
      {&train, "train"}, {&test_i, "test-I"}, {&test_s, "test-S"}, {&test_w, "test-W"}};
  for (const auto& [list, name] : lists) {
    for (const auto& key : *list) {
      auto [it, fresh] = owner.emplace(key, name);
      if (!fresh) {
        throw ValidationError("task " + std::to_string(key.second) + " of world '" + key.first +
                              "' is in both " + std::string(it->second) + " and " +
                              std::string(name));
      }
    }
  }
}

SplitPlan plan_splits(const WorldSet& worlds, const PipelineConfig& cfg) {
  std::vector<const World*> mobile, web;
  for (const auto& e : worlds.entries()) {
    (e.family == Family::Mobile ? mobile : web).push_back(&e.world);
  }
  if (web.empty()) throw ValidationError("missing family 'web' for test-W");
  const auto holdout = static_cast<std::size_t>(cfg.scenario_holdout);
  if (mobile.size() < holdout + 1) {
    throw ValidationError("insufficient worlds: family 'mobile' needs at least " +
                          std::to_string(holdout + 1) + ", got " + std::to_string(mobile.size()));
  }
  SplitPlan plan;
  const std::size_t seen = mobile.size() - holdout;
  for (std::size_t w = 0; w < mobile.size(); ++w) {
    const World& world = *mobile[w];
    const std::size_t n = world.tasks().size();
    if (w >= seen) {
      for (std::size_t t = 0; t < n; ++t) plan.test_s.emplace_back(world.name(), t);
      continue;
    }
    auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * n));
    n_train = std::clamp<std::size_t>(n_train, 1, n);
    for (std::size_t t = 0; t < n; ++t) {
      (t < n_train ? plan.train : plan.test_i).emplace_back(world.name(), t);
    }
  }
  for (const World* w : web) {
    for (std::size_t t = 0; t < w->tasks().size(); ++t) plan.test_w.emplace_back(w->name(), t);
  }
  plan.validate();
  return plan;
}

const Dataset& CollectedData::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::TestI: return test_i;
    case Split::TestS: return test_s;
    case Split::TestW: return test_w;
  }
  throw std::logic_error("unknown split");
}

namespace {

// Positives and negatives of one task. The negative stream is keyed by
// (seed, world, task) so it does not depend on which other tasks exist.
std::vector<Sample> collect_task(const World& world, std::size_t task, NegativeStrategy strategy,
                                 int draws, std::uint64_t seed) {
  auto samples = collect_positives(world, {task});
  std::vector<EnvState> states;
  std::vector<Action> suggestions;
  for (const auto& s : samples) {
    states.push_back(s.state);
    suggestions.push_back(s.suggestion);
  }
  Rng rng = make_rng(derive_seed(seed, {stable_hash("negatives"), stable_hash(world.name()), task}));
  auto neg = strategy == NegativeStrategy::Proposer
                 ? sample_negatives(world, states, suggestions, AgentPolicy::uniform(), rng, draws)
                 : random_negatives(world, states, suggestions, rng, draws);
  samples.insert(samples.end(), std::make_move_iterator(neg.begin()),
                 std::make_move_iterator(neg.end()));
  return samples;
}

Dataset clean_split(const WorldSet& worlds, const std::vector<TaskKey>& tasks, Split split,
                    std::uint64_t seed) {
  Dataset d;
  for (const auto& [world, task] : tasks) {
    for (auto& s : collect_task(worlds.get(world), task, NegativeStrategy::Proposer, 1, seed)) {
      d.samples.push_back(std::move(s));
    }
  }
  for (auto& s : d.samples) s.split = split;
  d.canonicalize();
  return d;
}

nlohmann::json provenance(const PipelineConfig& cfg, std::uint64_t seed, Split split,
                          const Dataset& d) {
  return {{"seed", seed},
          {"split", split_name(split)},
          {"pipeline", to_json(cfg)},
          {"positives", d.positives()},
          {"negatives", d.negatives()}};
}

}  // namespace

CollectedData make_splits(const WorldSet& worlds, const SplitPlan& plan, const PipelineConfig& cfg,
                          std::uint64_t seed) {
  cfg.validate();
  plan.validate();
  CollectedData out;

  Dataset raw;
  for (const auto& [world, task] : plan.train) {
    for (auto& s : collect_task(worlds.get(world), task, cfg.negatives, cfg.neg_ratio, seed)) {
      raw.samples.push_back(std::move(s));
    }
  }
  raw.canonicalize();

  Rng filter_rng = make_rng(derive_seed(seed, {stable_hash("filter")}));
  if (cfg.filter) {
    out.train.samples = filter_samples(worlds, std::move(raw.samples),
                                       noisy_oracle_fn(cfg.judge_error), cfg.label_noise,
                                       filter_rng);
  } else {
    // Random selection at the judge filter's expected retention rate.
    apply_label_noise(raw.samples, cfg.label_noise, filter_rng);
    const double keep = (1.0 - cfg.label_noise) * (1.0 - cfg.judge_error) +
                        cfg.label_noise * cfg.judge_error;
    for (auto& s : raw.samples) {
      if (bernoulli(filter_rng, keep)) out.train.samples.push_back(std::move(s));
    }
  }
  out.train.provenance = provenance(cfg, seed, Split::Train, out.train);

  if (cfg.cot) {
    Rng cot_rng = make_rng(derive_seed(seed, {stable_hash("bootstrap")}));
    out.cot = bootstrap_cot(worlds, out.train.samples, corrupted_oracle_fn(cfg.bootstrap_epsilon),
                            cfg.bootstrap_max, cot_rng, &out.bootstrap);
  }
  out.cot.provenance = provenance(cfg, seed, Split::Train, out.cot);
  out.cot.provenance["bootstrap"] = {{"tries", out.bootstrap.tries},
                                     {"kept", out.bootstrap.kept},
                                     {"dropped", out.bootstrap.dropped}};

  out.test_i = clean_split(worlds, plan.test_i, Split::TestI, seed);
  out.test_s = clean_split(worlds, plan.test_s, Split::TestS, seed);
  out.test_w = clean_split(worlds, plan.test_w, Split::TestW, seed);
  out.test_i.provenance = provenance(cfg, seed, Split::TestI, out.test_i);
  out.test_s.provenance = provenance(cfg, seed, Split::TestS, out.test_s);
  out.test_w.provenance = provenance(cfg, seed, Split::TestW, out.test_w);
  return out;
}

}  // namespace precritic
