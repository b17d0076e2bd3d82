#include "precritic/features.hpp"

#include <algorithm>
#include <numeric>

#include "precritic/error.hpp"
#include "precritic/rng.hpp"

namespace precritic {

FeatureSpec FeatureSpec::for_vocab(const Vocab& vocab) {
  FeatureSpec spec;
  spec.screens = vocab.screen_count();
  spec.actions = vocab.action_count();
  return spec;
}

std::uint64_t FeatureSpec::hash() const {
  std::uint64_t h = stable_hash("features/v2");
  for (auto v : {screens, actions, instruction_buckets, history_k, goal_cross_buckets,
                 transition_cross_buckets, decision_cross_buckets, label_cross_buckets}) {
    h = mix64(h ^ v);
  }
  return h;
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) out[index[i]] = value[i];
  return out;
}

namespace {

std::size_t bucket(std::uint64_t h, std::size_t buckets) {
  return static_cast<std::size_t>(mix64(h) % buckets);
}

}  // namespace

FeatureVector featurize(const FeatureSpec& spec, const Vocab& vocab, const World& world,
                        const EnvState& state, const Action& action) {
  const auto& screen_name = world.screen(state.screen).id;
  const auto screen_idx = vocab.screen_index(screen_name);
  if (!screen_idx) throw ValidationError("screen '" + screen_name + "' not in vocabulary");
  const auto action_idx = vocab.action_index(action);
  if (!action_idx) {
    throw ValidationError("unknown action template " + to_string(action));
  }
  const auto& task = world.tasks().at(state.task);

  std::vector<std::pair<std::uint32_t, double>> entries;
  auto put = [&](std::size_t i, double v) { entries.emplace_back(static_cast<std::uint32_t>(i), v); };

  const auto world_h = stable_hash(world.name());
  const auto instr_h = mix64(world_h ^ mix64(static_cast<std::uint64_t>(task.instruction_id)));
  const auto screen_h = stable_hash(screen_name, instr_h);
  const auto action_str = to_string(action);

  put(0, 1.0);
  put(spec.instruction_offset() + bucket(instr_h, spec.instruction_buckets), 1.0);
  put(spec.screen_offset() + *screen_idx, 1.0);
  const auto& hist = state.history;
  for (std::size_t j = 0; j < spec.history_k; ++j) {
    std::size_t kind_slot = kActionKindCount;  // no action
    if (j < hist.size()) kind_slot = static_cast<std::size_t>(hist[hist.size() - 1 - j].kind);
    put(spec.history_offset() + j * (kActionKindCount + 1) + kind_slot, 1.0);
  }
  const double ratio = static_cast<double>(state.step_count()) / task.max_steps;
  if (ratio != 0.0) put(spec.step_offset(), ratio);
  put(spec.goal_cross_offset() + bucket(screen_h, spec.goal_cross_buckets), 1.0);

  put(spec.action_offset() + *action_idx, 1.0);
  put(spec.kind_offset() + static_cast<std::size_t>(action.kind), 1.0);
  put(spec.transition_cross_offset() +
          bucket(stable_hash(action_str, stable_hash(screen_name, world_h)),
                 spec.transition_cross_buckets),
      1.0);
  put(spec.decision_cross_offset() +
          bucket(stable_hash(action_str, screen_h), spec.decision_cross_buckets),
      1.0);
  const Edge* edge = action.kind == ActionKind::Done ? nullptr : world.find_edge(state.screen, action);
  const auto& label = world.screen(edge ? edge->to : state.screen).id;
  put(spec.label_cross_offset() + bucket(stable_hash(label, instr_h), spec.label_cross_buckets),
      1.0);

  std::sort(entries.begin(), entries.end());
  FeatureVector fv;
  fv.dim = spec.dimension();
  for (const auto& [i, v] : entries) {
    fv.index.push_back(i);
    fv.value.push_back(v);
  }
  return fv;
}

}  // namespace precritic
