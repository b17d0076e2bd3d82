#include "precritic/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "precritic/error.hpp"
#include "precritic/kernels.hpp"
#include "precritic/oracle.hpp"

namespace precritic {

StaticReport static_report(const WorldSet& worlds, const Dataset& data, const CriticFn& critic,
                           std::string split) {
  if (data.empty()) throw ValidationError("static metrics on empty split '" + split + "'");
  const auto outputs = parallel::judge_samples(worlds, data.samples, critic);
  StaticReport r;
  r.split = std::move(split);
  r.n = data.size();
  std::size_t score_ok = 0, sugg_ok = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& s = data.samples[i];
    const auto& out = outputs[i];
    if (!out) {
      ++r.unparseable;
      continue;
    }
    if (out->score == s.label) ++score_ok;
    if (similar(worlds.get(s.world), s.state, out->suggestion, s.suggestion)) ++sugg_ok;
    if (s.label == 1) ++(out->score == 1 ? r.pos_pred_pos : r.pos_pred_neg);
    else ++(out->score == 1 ? r.neg_pred_pos : r.neg_pred_neg);
  }
  r.critic_acc = static_cast<double>(score_ok) / static_cast<double>(r.n);
  r.sugg_acc = static_cast<double>(sugg_ok) / static_cast<double>(r.n);
  return r;
}

double critic_accuracy(const WorldSet& worlds, const Dataset& data, const CriticFn& critic) {
  return static_report(worlds, data, critic, "").critic_acc;
}

double suggestion_accuracy(const WorldSet& worlds, const Dataset& data, const CriticFn& critic) {
  return static_report(worlds, data, critic, "").sugg_acc;
}

double success_rate(std::span<const SuiteRow> rows) {
  if (rows.empty()) throw ValidationError("success rate of an empty result set");
  const auto ok = std::count_if(rows.begin(), rows.end(),
                                [](const SuiteRow& r) { return r.result.success; });
  return static_cast<double>(ok) / static_cast<double>(rows.size());
}

namespace {

using PairKey = std::tuple<std::string, std::string, std::uint64_t>;

std::map<PairKey, const SuiteRow*> index_rows(std::span<const SuiteRow> rows, const char* side) {
  std::map<PairKey, const SuiteRow*> out;
  for (const auto& r : rows) {
    if (!out.emplace(PairKey{r.world, r.task, r.seed}, &r).second) {
      throw ValidationError(std::string("duplicate ") + side + " row for " + r.world + "/" +
                            r.task + "/seed " + std::to_string(r.seed));
    }
  }
  return out;
}

std::string key_text(const PairKey& k) {
  return std::get<0>(k) + "/" + std::get<1>(k) + "/seed " + std::to_string(std::get<2>(k));
}

}  // namespace

EarResult ear(std::span<const SuiteRow> baseline, std::span<const SuiteRow> critic,
              bool include_failures) {
  if (baseline.empty() || critic.empty()) throw ValidationError("EAR needs non-empty result sets");
  const auto base = index_rows(baseline, "baseline");
  const auto crit = index_rows(critic, "critic");
  std::vector<std::string> unpaired;
  for (const auto& [k, _] : base) {
    if (!crit.contains(k)) unpaired.push_back("baseline-only " + key_text(k));
  }
  for (const auto& [k, _] : crit) {
    if (!base.contains(k)) unpaired.push_back("critic-only " + key_text(k));
  }
  if (!unpaired.empty()) {
    std::string msg = "unpaired EAR keys:";
    for (const auto& u : unpaired) msg += "\n  " + u;
    throw ValidationError(msg);
  }
  EarResult r;
  r.n_pairs = base.size();
  for (const auto& [k, b] : base) {
    const SuiteRow* c = crit.at(k);
    if (b->result.success != c->result.success) continue;
    if (!b->result.success && !include_failures) continue;
    ++r.n_consistent;
    if (c->result.steps < b->result.steps) ++r.n_advantage;
  }
  if (r.n_consistent > 0) {
    r.value = static_cast<double>(r.n_advantage) / static_cast<double>(r.n_consistent);
  }
  return r;
}

std::vector<DynamicReport> dynamic_reports(std::span<const SuiteRow> rows,
                                           std::string_view baseline, bool include_failures) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<SuiteRow>> by_config;
  for (const auto& r : rows) {
    auto [it, fresh] = by_config.try_emplace(r.config);
    if (fresh) order.push_back(r.config);
    it->second.push_back(r);
  }
  const auto base = by_config.find(std::string(baseline));
  if (base == by_config.end()) {
    throw ValidationError("baseline config '" + std::string(baseline) + "' has no results");
  }
  std::vector<DynamicReport> out;
  for (const auto& name : order) {
    const auto& rs = by_config.at(name);
    DynamicReport d;
    d.config = name;
    d.sr = success_rate(rs);
    d.n = rs.size();
    double steps = 0.0;
    for (const auto& r : rs) steps += r.result.steps;
    d.mean_steps = steps / static_cast<double>(rs.size());
    if (name != baseline) {
      const auto e = ear(base->second, rs, include_failures);
      d.ear = e.value;
      d.n_consistent = e.n_consistent;
    } else {
      d.n_consistent = rs.size();
    }
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

std::string num(double v) { return nlohmann::json(v).dump(); }

void check_format(std::string_view format) {
  if (format != "json" && format != "csv") {
    throw ValidationError("unknown report format '" + std::string(format) +
                          "' (expected json or csv)");
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string format_reports(std::span<const StaticReport> reports, std::string_view format) {
  check_format(format);
  if (format == "csv") {
    std::string out = "split,critic_acc,sugg_acc,n\n";
    for (const auto& r : reports) {
      out += r.split + "," + num(r.critic_acc) + "," + num(r.sugg_acc) + "," +
             std::to_string(r.n) + "\n";
    }
    return out;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["split"] = r.split;
    j["critic_acc"] = r.critic_acc;
    j["sugg_acc"] = r.sugg_acc;
    j["n"] = r.n;
    j["confusion"] = {{"pos_pred_pos", r.pos_pred_pos},
                      {"pos_pred_neg", r.pos_pred_neg},
                      {"neg_pred_pos", r.neg_pred_pos},
                      {"neg_pred_neg", r.neg_pred_neg},
                      {"unparseable", r.unparseable}};
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string format_reports(std::span<const DynamicReport> reports, std::string_view format) {
  check_format(format);
  if (format == "csv") {
    std::string out = "config,sr,ear,n,n_consistent,mean_steps\n";
    for (const auto& r : reports) {
      out += r.config + "," + num(r.sr) + "," + (r.ear ? num(*r.ear) : "") + "," +
             std::to_string(r.n) + "," + std::to_string(r.n_consistent) + "," +
             num(r.mean_steps) + "\n";
    }
    return out;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["config"] = r.config;
    j["sr"] = r.sr;
    j["ear"] = r.ear ? nlohmann::ordered_json(*r.ear) : nlohmann::ordered_json(nullptr);
    j["n"] = r.n;
    j["n_consistent"] = r.n_consistent;
    j["mean_steps"] = r.mean_steps;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void emit_report(std::span<const StaticReport> reports, const std::filesystem::path& path,
                 std::string_view format) {
  write_file(path, format_reports(reports, format));
}

void emit_report(std::span<const DynamicReport> reports, const std::filesystem::path& path,
                 std::string_view format) {
  write_file(path, format_reports(reports, format));
}

}  // namespace precritic
