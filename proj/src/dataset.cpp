#include "precritic/dataset.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "precritic/error.hpp"

namespace precritic {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {
constexpr std::array<std::string_view, 4> kSplitNames = {"train", "test-I", "test-S", "test-W"};

ordered_json action_json(const Action& a) {
  ordered_json j;
  j["kind"] = kind_name(a.kind);
  j["target"] = a.target.empty() ? ordered_json(nullptr) : ordered_json(a.target);
  return j;
}
}  // namespace

std::string_view split_name(Split split) { return kSplitNames[static_cast<std::size_t>(split)]; }

std::optional<Split> split_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kSplitNames.size(); ++i) {
    if (kSplitNames[i] == name) return static_cast<Split>(i);
  }
  return std::nullopt;
}

std::string Sample::key() const {
  std::string k = world;
  k += '\x1f';
  k += task;
  for (const auto& a : state.history) {
    k += '\x1f';
    k += to_string(a);
  }
  k += '\x1e';
  k += to_string(action);
  return k;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.label == 1; }));
}

void Dataset::canonicalize() {
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) keys.emplace_back(samples[i].key(), i);
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i].first == keys[i - 1].first) {
      const auto& s = samples[keys[i].second];
      throw ValidationError("duplicate sample for world '" + s.world + "' task '" + s.task +
                            "' action " + to_string(s.action));
    }
  }
  std::vector<Sample> sorted;
  sorted.reserve(samples.size());
  for (const auto& [_, i] : keys) sorted.push_back(std::move(samples[i]));
  samples = std::move(sorted);
}

ordered_json sample_to_json(const Sample& s) {
  ordered_json j;
  j["world"] = s.world;
  j["task"] = s.task;
  j["screen"] = s.screen;
  j["history"] = ordered_json::array();
  for (const auto& a : s.state.history) j["history"].push_back(action_json(a));
  j["action"] = action_json(s.action);
  j["label"] = s.label;
  j["suggestion"] = action_json(s.suggestion);
  if (s.thinking) {
    ordered_json t;
    t["obs"] = s.thinking->observed;
    t["pred"] = s.thinking->predicted;
    t["crit"] = s.thinking->critique;
    j["thinking"] = t;
  } else {
    j["thinking"] = nullptr;
  }
  j["split"] = split_name(s.split);
  return j;
}

Sample sample_from_json(const json& j, const WorldSet& worlds) {
  static constexpr std::array<std::string_view, 9> kFields = {
      "world", "task", "screen", "history", "action", "label", "suggestion", "thinking", "split"};
  if (!j.is_object()) throw ParseError("record: expected object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
      throw ParseError("record: unknown field '" + key + "'");
    }
  }
  for (auto f : kFields) {
    if (!j.contains(f)) throw ParseError("record: missing field '" + std::string(f) + "'");
  }
  Sample s;
  s.world = j.at("world").get<std::string>();
  s.task = j.at("task").get<std::string>();
  s.screen = j.at("screen").get<std::string>();
  const auto* entry = worlds.find(s.world);
  if (!entry) throw ValidationError("record: unknown world '" + s.world + "'");
  const auto& world = entry->world;
  const auto task = world.find_task(s.task);
  if (!task) throw ValidationError("record: unknown task '" + s.task + "' in '" + s.world + "'");
  std::vector<Action> history;
  for (const auto& a : j.at("history")) history.push_back(action_from_json(a, "history"));
  s.state = replay(world, *task, history);
  if (world.screen(s.state.screen).id != s.screen) {
    throw ValidationError("record: history does not lead to screen '" + s.screen + "'");
  }
  s.action = action_from_json(j.at("action"), "action");
  const auto& label = j.at("label");
  if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
    throw ParseError("record.label: expected 0 or 1");
  }
  s.label = label.get<int>();
  s.suggestion = action_from_json(j.at("suggestion"), "suggestion");
  if (const auto& t = j.at("thinking"); !t.is_null()) {
    s.thinking = Thinking{t.at("obs").get<std::string>(), t.at("pred").get<std::string>(),
                          t.at("crit").get<int>()};
  }
  const auto split = split_from_name(j.at("split").get<std::string>());
  if (!split) throw ParseError("record.split: unknown split");
  s.split = *split;
  return s;
}

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& s : dataset.samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << dataset_to_jsonl(dataset);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Dataset read_jsonl(const std::filesystem::path& path, const WorldSet& worlds) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      ds.samples.push_back(sample_from_json(json::parse(line), worlds));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  ds.canonicalize();
  return ds;
}

}  // namespace precritic
