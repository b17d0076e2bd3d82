#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "precritic/grammar.hpp"
#include "precritic/world.hpp"
#include "precritic/world_gen.hpp"

namespace precritic {

enum class Split { Train, TestI, TestS, TestW };

std::string_view split_name(Split split);
std::optional<Split> split_from_name(std::string_view name);

// One critic training/evaluation record: (state, action, label, suggestion
// [, thinking]).
struct Sample {
  std::string world;
  std::string task;    // task id; state.task is its index in the world
  std::string screen;  // id of state.screen
  EnvState state;
  Action action;
  int label = 0;
  Action suggestion;
  std::optional<Thinking> thinking;
  Split split = Split::Train;

  // Identity of the (state, action) pair; defines the canonical order.
  std::string key() const;
};

struct Dataset {
  std::vector<Sample> samples;
  nlohmann::json provenance = nlohmann::json::object();

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t positives() const;
  std::size_t negatives() const { return samples.size() - positives(); }

  // Sorts by key; throws ValidationError on duplicate (state, action) pairs.
  void canonicalize();
};

nlohmann::ordered_json sample_to_json(const Sample& sample);
Sample sample_from_json(const nlohmann::json& j, const WorldSet& worlds);

// JSON lines, canonical order, byte-stable.
std::string dataset_to_jsonl(const Dataset& dataset);
void write_jsonl(const Dataset& dataset, const std::filesystem::path& path);
// Replays each history against its world and checks the recorded screen.
Dataset read_jsonl(const std::filesystem::path& path, const WorldSet& worlds);

}  // namespace precritic
