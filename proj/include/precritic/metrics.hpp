#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "precritic/agent.hpp"
#include "precritic/critic.hpp"
#include "precritic/dataset.hpp"

namespace precritic {

struct StaticReport {
  std::string split;
  double critic_acc = 0.0;
  double sugg_acc = 0.0;
  std::size_t n = 0;
  // Rows are labels, "pred" is the parsed score; unparseable outputs are
  // counted separately.
  std::size_t pos_pred_pos = 0, pos_pred_neg = 0, neg_pred_pos = 0, neg_pred_neg = 0;
  std::size_t unparseable = 0;
};

// Greedy critic outputs are judged once per sample. Throws ValidationError on
// an empty dataset.
StaticReport static_report(const WorldSet& worlds, const Dataset& data, const CriticFn& critic,
                           std::string split);

double critic_accuracy(const WorldSet& worlds, const Dataset& data, const CriticFn& critic);
double suggestion_accuracy(const WorldSet& worlds, const Dataset& data, const CriticFn& critic);

double success_rate(std::span<const SuiteRow> rows);

struct EarResult {
  std::optional<double> value;  // nullopt when no pair is consistent
  std::size_t n_pairs = 0;
  std::size_t n_consistent = 0;
  std::size_t n_advantage = 0;
};

// Pairs rows by (world, task, seed). A pair is consistent when both runs
// share the success outcome; include_failures=false drops consistently failed
// pairs. Throws ValidationError listing keys present on one side only.
EarResult ear(std::span<const SuiteRow> baseline, std::span<const SuiteRow> critic,
              bool include_failures = true);

struct DynamicReport {
  std::string config;
  double sr = 0.0;
  std::optional<double> ear;  // absent for the baseline itself
  std::size_t n = 0;
  std::size_t n_consistent = 0;
  double mean_steps = 0.0;
};

// One report per config in first-appearance order; EAR against `baseline`.
std::vector<DynamicReport> dynamic_reports(std::span<const SuiteRow> rows,
                                           std::string_view baseline,
                                           bool include_failures = true);

// "json" or "csv"; anything else throws ValidationError. Byte-stable.
std::string format_reports(std::span<const StaticReport> reports, std::string_view format);
std::string format_reports(std::span<const DynamicReport> reports, std::string_view format);

void emit_report(std::span<const StaticReport> reports, const std::filesystem::path& path,
                 std::string_view format);
void emit_report(std::span<const DynamicReport> reports, const std::filesystem::path& path,
                 std::string_view format);

}  // namespace precritic
