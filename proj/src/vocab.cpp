#include "precritic/vocab.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "precritic/rng.hpp"
#include "precritic/world.hpp"

namespace precritic {

Vocab::Vocab(std::vector<std::string> screens, std::vector<Action> actions)
    : screens_(std::move(screens)), actions_(std::move(actions)) {
  std::sort(screens_.begin(), screens_.end());
  screens_.erase(std::unique(screens_.begin(), screens_.end()), screens_.end());
  actions_.push_back(Action::done());
  std::sort(actions_.begin(), actions_.end());
  actions_.erase(std::unique(actions_.begin(), actions_.end()), actions_.end());

  for (std::size_t i = 0; i < screens_.size(); ++i) screen_lookup_.emplace(screens_[i], i);
  for (std::size_t i = 0; i < actions_.size(); ++i) action_lookup_.emplace(to_string(actions_[i]), i);

  const auto s = static_cast<TokenId>(screens_.size());
  crit_ok_ = 1 + 2 * s;
  act_begin_ = crit_ok_ + 8;
  eos_ = act_begin_ + static_cast<TokenId>(actions_.size()) + 1;

  std::uint64_t h = stable_hash("vocab/v1");
  for (const auto& name : screens_) h = stable_hash(name + "\n", h);
  h = stable_hash("--\n", h);
  for (const auto& a : actions_) h = stable_hash(to_string(a) + "\n", h);
  hash_ = h;
}

Vocab Vocab::from_worlds(std::span<const World* const> worlds) {
  std::set<std::string> screens;
  std::set<Action> actions;
  for (const World* w : worlds) {
    for (const auto& s : w->screens()) screens.insert(s.id);
    for (const auto& e : w->edges()) actions.insert(e.action);
  }
  return Vocab({screens.begin(), screens.end()}, {actions.begin(), actions.end()});
}

std::optional<std::size_t> Vocab::screen_index(std::string_view screen) const {
  auto it = screen_lookup_.find(std::string(screen));
  if (it == screen_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Vocab::action_index(const Action& action) const {
  auto it = action_lookup_.find(to_string(action));
  if (it == action_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> Vocab::obs(std::string_view screen) const {
  auto i = screen_index(screen);
  if (!i) return std::nullopt;
  return static_cast<TokenId>(1 + *i);
}

std::optional<TokenId> Vocab::pred(std::string_view screen) const {
  auto i = screen_index(screen);
  if (!i) return std::nullopt;
  return static_cast<TokenId>(1 + screens_.size() + *i);
}

std::optional<TokenId> Vocab::action_token(const Action& action) const {
  auto i = action_index(action);
  if (!i) return std::nullopt;
  return static_cast<TokenId>(act_begin_ + *i);
}

TokenKind Vocab::kind(TokenId t) const {
  if (t > eos_) throw std::out_of_range("token id out of range");
  const auto s = static_cast<TokenId>(screens_.size());
  if (t == 0) return TokenKind::ThinkOpen;
  if (t <= s) return TokenKind::Obs;
  if (t <= 2 * s) return TokenKind::Pred;
  if (t < act_begin_) return static_cast<TokenKind>(static_cast<int>(TokenKind::CritOk) + (t - crit_ok_));
  if (t < eos_ - 1) return TokenKind::Act;
  if (t == eos_ - 1) return TokenKind::SuggClose;
  return TokenKind::Eos;
}

const std::string& Vocab::screen_of(TokenId t) const {
  const auto k = kind(t);
  if (k == TokenKind::Obs) return screens_[t - 1];
  if (k == TokenKind::Pred) return screens_[t - 1 - screens_.size()];
  throw std::invalid_argument("token is not a screen token");
}

const Action& Vocab::action_of(TokenId t) const {
  if (kind(t) != TokenKind::Act) throw std::invalid_argument("token is not an action token");
  return actions_[t - act_begin_];
}

std::string Vocab::token_name(TokenId t) const {
  switch (kind(t)) {
    case TokenKind::ThinkOpen: return "<thinking>";
    case TokenKind::Obs: return "OBS(" + screen_of(t) + ")";
    case TokenKind::Pred: return "PRED(" + screen_of(t) + ")";
    case TokenKind::CritOk: return "CRIT_OK";
    case TokenKind::CritBad: return "CRIT_BAD";
    case TokenKind::ThinkClose: return "</thinking>";
    case TokenKind::ScoreOpen: return "<score>";
    case TokenKind::Correct: return "Correct";
    case TokenKind::Incorrect: return "Incorrect";
    case TokenKind::ScoreClose: return "</score>";
    case TokenKind::SuggOpen: return "<suggestion>";
    case TokenKind::Act: return to_string(action_of(t));
    case TokenKind::SuggClose: return "</suggestion>";
    case TokenKind::Eos: return "<eos>";
  }
  return "?";
}

}  // namespace precritic
