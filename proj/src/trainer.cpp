#include "precritic/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "precritic/error.hpp"

namespace precritic {

std::vector<RftTarget> rft_targets(const CriticModel& model, const WorldSet& worlds,
                                   const Dataset& action_data, const Dataset& cot_data) {
  std::vector<RftTarget> out;
  out.reserve(action_data.size() + cot_data.size());
  for (const auto& s : action_data.samples) {
    out.push_back({model.features(worlds.get(s.world), s.state, s.action),
                   encode(model.vocab, s.label, s.suggestion)});
  }
  for (const auto& s : cot_data.samples) {
    if (!s.thinking) throw ValidationError("D_c_cot sample without thinking: " + s.key());
    out.push_back({model.features(worlds.get(s.world), s.state, s.action),
                   encode(model.vocab, s.label, s.suggestion, s.thinking)});
  }
  return out;
}

double rft_step(CriticPolicy& policy, std::span<const RftTarget> batch, double learning_rate) {
  const auto g = parallel::rft_gradient(policy, batch);
  if (!std::isfinite(g.mean_loss)) {
    throw TrainingError("RFT loss is not finite (" + std::to_string(g.mean_loss) + ") over " +
                        std::to_string(batch.size()) + " targets at policy version " +
                        std::to_string(policy.version()));
  }
  policy.apply(g.grad, -learning_rate);
  if (!policy.finite_in(g.grad)) {
    throw TrainingError("RFT update produced non-finite weights at policy version " +
                        std::to_string(policy.version()));
  }
  return g.mean_loss;
}

std::vector<GrpoInput> grpo_inputs(const CriticModel& model, const WorldSet& worlds,
                                   const Dataset& action_data) {
  std::vector<GrpoInput> out;
  out.reserve(action_data.size());
  for (const auto& s : action_data.samples) {
    const World& w = worlds.get(s.world);
    out.push_back({&w, s.state, s.action, s.label, s.suggestion, model.features(w, s.state, s.action)});
  }
  return out;
}

namespace {

std::string dump_group(const Vocab& vocab, const GrpoInput& in, const GroupResult& g) {
  std::ostringstream os;
  os << "world '" << in.world->name() << "' task " << in.state.task << " action "
     << to_string(in.action) << " label " << in.label << "\n";
  for (const auto& o : g.outputs) {
    os << "  " << render(vocab, o.tokens) << " r=" << o.reward.r << " A=" << o.advantage
       << " lp=" << o.logprob << " lp_old=" << o.logprob_old << " lp_ref=" << o.logprob_ref
       << " ratio=" << o.ratio << " kl=" << o.kl << "\n";
  }
  return os.str();
}

}  // namespace

SgrpoStats sgrpo_step(CriticPolicy& policy, const CriticPolicy& ref, const Vocab& vocab,
                      std::span<const GrpoInput> batch, const TrainConfig& cfg,
                      std::uint64_t seed) {
  SgrpoStats st;
  if (batch.empty()) return st;
  // Sampling and old log-probs finish before the update, so the live policy
  // is the frozen old policy for this step.
  const CriticPolicy& old = policy;
  std::vector<GroupTask> tasks;
  tasks.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) tasks.push_back({&batch[i], derive_seed(seed, {i})});
  st.groups = parallel::grpo_groups(policy, old, ref, vocab, tasks, cfg);

  for (std::size_t i = 0; i < st.groups.size(); ++i) {
    const auto& g = st.groups[i];
    if (!std::isfinite(g.objective)) {
      throw TrainingError("S-GRPO objective is not finite in group:\n" +
                          dump_group(vocab, batch[i], g));
    }
    st.objective += g.objective;
    for (const auto& o : g.outputs) {
      st.mean_r += o.reward.r;
      st.mean_r_f += o.reward.r_f;
      st.mean_r_a += o.reward.r_a;
      st.mean_r_s += o.reward.r_s;
      st.mean_kl += o.kl;
      ++st.outputs;
    }
  }
  const double n = static_cast<double>(st.outputs);
  st.objective /= n;
  st.mean_r /= n;
  st.mean_r_f /= n;
  st.mean_r_a /= n;
  st.mean_r_s /= n;
  st.mean_kl /= n;

  const auto grad = reduce_groups(st.groups, policy.vocab_size());
  policy.apply(grad, cfg.learning_rate / n);
  if (!policy.finite_in(grad)) {
    throw TrainingError("S-GRPO update produced non-finite weights at policy version " +
                        std::to_string(policy.version()));
  }
  return st;
}

nlohmann::ordered_json to_json(const EpochRecord& r, bool with_wall) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["mean_r"] = r.mean_r;
  j["mean_r_f"] = r.mean_r_f;
  j["mean_r_a"] = r.mean_r_a;
  j["mean_r_s"] = r.mean_r_s;
  j["mean_kl"] = r.mean_kl;
  if (with_wall) j["wall_ms"] = r.wall_ms;
  return j;
}

namespace {

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& items, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace

TrainResult train(CriticModel& model, const WorldSet& worlds, const Dataset& action_data,
                  const Dataset& cot_data, const TrainConfig& cfg) {
  cfg.validate();
  if (action_data.empty()) throw ValidationError("training needs a non-empty D_c_action");
  TrainResult result;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  const auto targets = rft_targets(model, worlds, action_data, cot_data);
  for (int epoch = 0; epoch < cfg.rft_epochs; ++epoch) {
    const auto order = shuffled(targets.size(), derive_seed(cfg.seed, {stable_hash("rft"),
                                                                       static_cast<std::uint64_t>(epoch)}));
    double loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += batch) {
      const auto idx = std::span(order).subspan(b, std::min(batch, order.size() - b));
      const auto items = gather(targets, idx);
      loss += rft_step(model.policy, items, cfg.rft_learning_rate) * static_cast<double>(idx.size());
    }
    result.rft_loss.push_back(loss / static_cast<double>(targets.size()));
  }

  result.reference = model.policy;
  const auto inputs = grpo_inputs(model, worlds, action_data);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ep = static_cast<std::uint64_t>(epoch);
    const auto order = shuffled(inputs.size(), derive_seed(cfg.seed, {stable_hash("grpo-order"), ep}));
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t outputs = 0;
    for (std::size_t b = 0; b < order.size(); b += batch) {
      const auto idx = std::span(order).subspan(b, std::min(batch, order.size() - b));
      const auto items = gather(inputs, idx);
      const auto st = sgrpo_step(model.policy, result.reference, model.vocab, items, cfg,
                                 derive_seed(cfg.seed, {stable_hash("grpo"), ep, b}));
      const auto n = static_cast<double>(st.outputs);
      rec.mean_r += st.mean_r * n;
      rec.mean_r_f += st.mean_r_f * n;
      rec.mean_r_a += st.mean_r_a * n;
      rec.mean_r_s += st.mean_r_s * n;
      rec.mean_kl += st.mean_kl * n;
      outputs += st.outputs;
    }
    const double n = static_cast<double>(outputs);
    rec.mean_r /= n;
    rec.mean_r_f /= n;
    rec.mean_r_a /= n;
    rec.mean_r_s /= n;
    rec.mean_kl /= n;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(rec);
  }
  return result;
}

std::string training_log_jsonl(const TrainResult& result, bool with_wall) {
  std::string out;
  for (const auto& r : result.log) {
    out += to_json(r, with_wall).dump();
    out += '\n';
  }
  return out;
}

}  // namespace precritic
