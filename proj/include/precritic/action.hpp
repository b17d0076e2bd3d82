#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace precritic {

enum class ActionKind : std::uint8_t { Click, LongPress, Type, Scroll, Home, Back, Done };

inline constexpr int kActionKindCount = 7;

std::string_view kind_name(ActionKind kind);
std::optional<ActionKind> kind_from_name(std::string_view name);

// Click/LongPress/Type target an element; Scroll carries "up" or "down".
constexpr bool kind_takes_target(ActionKind kind) {
  return kind == ActionKind::Click || kind == ActionKind::LongPress ||
         kind == ActionKind::Type || kind == ActionKind::Scroll;
}

// An operation on the device. Ordered by (kind, target); that order is the
// tie-break whenever a single action must be chosen among equals.
struct Action {
  ActionKind kind = ActionKind::Done;
  std::string target;  // empty iff !kind_takes_target(kind)

  static Action click(std::string target) { return {ActionKind::Click, std::move(target)}; }
  static Action long_press(std::string target) { return {ActionKind::LongPress, std::move(target)}; }
  static Action type(std::string target) { return {ActionKind::Type, std::move(target)}; }
  static Action scroll(std::string direction) { return {ActionKind::Scroll, std::move(direction)}; }
  static Action home() { return {ActionKind::Home, {}}; }
  static Action back() { return {ActionKind::Back, {}}; }
  static Action done() { return {ActionKind::Done, {}}; }

  bool is_done() const { return kind == ActionKind::Done; }

  auto operator<=>(const Action&) const = default;
  bool operator==(const Action&) const = default;
};

// Throws ValidationError when the target presence rule is broken.
void validate_action(const Action& action);

// "Click(e1)", "Scroll(down)", "Back".
std::string to_string(const Action& action);

// Inverse of to_string; throws ParseError.
Action action_from_string(std::string_view text);

nlohmann::json to_json(const Action& action);

// Strict: {"kind": str, "target": str|null}, no other fields. Throws ParseError.
Action action_from_json(const nlohmann::json& j, std::string_view where = "action");

}  // namespace precritic
