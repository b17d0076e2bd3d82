#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "precritic/action.hpp"

namespace precritic {

class World;

using TokenId = std::uint32_t;

enum class TokenKind : std::uint8_t {
  ThinkOpen,
  Obs,
  Pred,
  CritOk,
  CritBad,
  ThinkClose,
  ScoreOpen,
  Correct,
  Incorrect,
  ScoreClose,
  SuggOpen,
  Act,
  SuggClose,
  Eos,
};

// Dense token table for critic outputs. Layout follows the grammar order:
//   THINK_OPEN, OBS(s)..., PRED(s)..., CRIT_OK, CRIT_BAD, THINK_CLOSE,
//   SCORE_OPEN, CORRECT, INCORRECT, SCORE_CLOSE, SUGG_OPEN, ACT(a)...,
//   SUGG_CLOSE, EOS
// Screen names and action templates are sorted, so ids are stable for a
// given symbol set. Done is always an action template.
class Vocab {
 public:
  Vocab(std::vector<std::string> screens, std::vector<Action> actions);

  // Union of screen ids and edge action templates over all worlds.
  static Vocab from_worlds(std::span<const World* const> worlds);

  std::size_t size() const { return eos_ + 1; }
  std::size_t screen_count() const { return screens_.size(); }
  std::size_t action_count() const { return actions_.size(); }

  const std::vector<std::string>& screens() const { return screens_; }
  const std::vector<Action>& actions() const { return actions_; }

  TokenId think_open() const { return 0; }
  TokenId crit_ok() const { return crit_ok_; }
  TokenId crit_bad() const { return crit_ok_ + 1; }
  TokenId think_close() const { return crit_ok_ + 2; }
  TokenId score_open() const { return crit_ok_ + 3; }
  TokenId correct() const { return crit_ok_ + 4; }
  TokenId incorrect() const { return crit_ok_ + 5; }
  TokenId score_close() const { return crit_ok_ + 6; }
  TokenId sugg_open() const { return crit_ok_ + 7; }
  TokenId sugg_close() const { return eos_ - 1; }
  TokenId eos() const { return eos_; }

  std::optional<TokenId> obs(std::string_view screen) const;
  std::optional<TokenId> pred(std::string_view screen) const;
  std::optional<TokenId> action_token(const Action& action) const;
  std::optional<std::size_t> screen_index(std::string_view screen) const;
  std::optional<std::size_t> action_index(const Action& action) const;

  TokenKind kind(TokenId token) const;
  // Only valid for Obs/Pred tokens.
  const std::string& screen_of(TokenId token) const;
  // Only valid for Act tokens.
  const Action& action_of(TokenId token) const;

  std::string token_name(TokenId token) const;
  std::uint64_t hash() const { return hash_; }

 private:
  std::vector<std::string> screens_;
  std::vector<Action> actions_;
  std::unordered_map<std::string, std::size_t> screen_lookup_;
  std::unordered_map<std::string, std::size_t> action_lookup_;
  TokenId crit_ok_ = 0;
  TokenId act_begin_ = 0;
  TokenId eos_ = 0;
  std::uint64_t hash_ = 0;
};

}  // namespace precritic
