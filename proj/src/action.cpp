#include "precritic/action.hpp"

#include <array>

#include "precritic/error.hpp"

namespace precritic {

namespace {
constexpr std::array<std::string_view, kActionKindCount> kKindNames = {
    "Click", "LongPress", "Type", "Scroll", "Home", "Back", "Done"};
}

std::string_view kind_name(ActionKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ActionKind> kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

void validate_action(const Action& action) {
  const bool needs = kind_takes_target(action.kind);
  if (needs && action.target.empty()) {
    throw ValidationError(std::string(kind_name(action.kind)) + " requires a target");
  }
  if (!needs && !action.target.empty()) {
    throw ValidationError(std::string(kind_name(action.kind)) + " takes no target");
  }
  if (action.kind == ActionKind::Scroll && action.target != "up" && action.target != "down") {
    throw ValidationError("Scroll direction must be up or down, got '" + action.target + "'");
  }
}

std::string to_string(const Action& action) {
  std::string out(kind_name(action.kind));
  if (!action.target.empty()) {
    out += '(';
    out += action.target;
    out += ')';
  }
  return out;
}

Action action_from_string(std::string_view text) {
  Action action;
  const auto open = text.find('(');
  const auto name = text.substr(0, open);
  const auto kind = kind_from_name(name);
  if (!kind) throw ParseError("unknown action kind '" + std::string(name) + "'");
  action.kind = *kind;
  if (open != std::string_view::npos) {
    if (text.back() != ')') throw ParseError("unterminated action '" + std::string(text) + "'");
    action.target = std::string(text.substr(open + 1, text.size() - open - 2));
  }
  try {
    validate_action(action);
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return action;
}

nlohmann::json to_json(const Action& action) {
  nlohmann::json j;
  j["kind"] = kind_name(action.kind);
  j["target"] = action.target.empty() ? nlohmann::json(nullptr) : nlohmann::json(action.target);
  return j;
}

Action action_from_json(const nlohmann::json& j, std::string_view where) {
  const std::string at(where);
  if (!j.is_object()) throw ParseError(at + ": expected object");
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "target") throw ParseError(at + ": unknown field '" + key + "'");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError(at + ".kind: expected string");
  }
  const auto kind = kind_from_name(j["kind"].get<std::string>());
  if (!kind) throw ParseError(at + ".kind: unknown kind '" + j["kind"].get<std::string>() + "'");
  Action action{*kind, {}};
  if (j.contains("target") && !j["target"].is_null()) {
    if (!j["target"].is_string()) throw ParseError(at + ".target: expected string or null");
    action.target = j["target"].get<std::string>();
  }
  try {
    validate_action(action);
  } catch (const ValidationError& e) {
    throw ParseError(at + ": " + e.what());
  }
  return action;
}

}  // namespace precritic
