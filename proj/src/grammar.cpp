#include "precritic/grammar.hpp"

#include <stdexcept>

namespace precritic {

std::optional<ParsedOutput> parse(const Vocab& vocab, std::span<const TokenId> tokens) {
  const std::size_t n = tokens.size();
  if (n != kShortOutputLength && n != kFullOutputLength) return std::nullopt;
  for (auto t : tokens) {
    if (t >= vocab.size()) return std::nullopt;
  }
  auto is = [&](std::size_t i, TokenKind k) { return vocab.kind(tokens[i]) == k; };

  ParsedOutput out;
  std::size_t i = 0;
  if (n == kFullOutputLength) {
    if (!is(0, TokenKind::ThinkOpen) || !is(1, TokenKind::Obs) || !is(2, TokenKind::Pred) ||
        !(is(3, TokenKind::CritOk) || is(3, TokenKind::CritBad)) || !is(4, TokenKind::ThinkClose)) {
      return std::nullopt;
    }
    out.thinking = Thinking{vocab.screen_of(tokens[1]), vocab.screen_of(tokens[2]),
                            is(3, TokenKind::CritOk) ? 1 : 0};
    i = 5;
  }
  if (!is(i, TokenKind::ScoreOpen)) return std::nullopt;
  if (is(i + 1, TokenKind::Correct)) {
    out.score = 1;
  } else if (is(i + 1, TokenKind::Incorrect)) {
    out.score = 0;
  } else {
    return std::nullopt;
  }
  if (!is(i + 2, TokenKind::ScoreClose) || !is(i + 3, TokenKind::SuggOpen) ||
      !is(i + 4, TokenKind::Act) || !is(i + 5, TokenKind::SuggClose) || !is(i + 6, TokenKind::Eos)) {
    return std::nullopt;
  }
  out.suggestion = vocab.action_of(tokens[i + 4]);
  return out;
}

std::vector<TokenId> encode(const Vocab& vocab, int score, const Action& suggestion,
                            const std::optional<Thinking>& thinking) {
  std::vector<TokenId> out;
  out.reserve(kFullOutputLength);
  if (thinking) {
    auto obs = vocab.obs(thinking->observed);
    auto pred = vocab.pred(thinking->predicted);
    if (!obs || !pred) throw std::invalid_argument("thinking screen not in vocabulary");
    out.insert(out.end(), {vocab.think_open(), *obs, *pred,
                           thinking->critique ? vocab.crit_ok() : vocab.crit_bad(),
                           vocab.think_close()});
  }
  auto act = vocab.action_token(suggestion);
  if (!act) throw std::invalid_argument("suggestion " + to_string(suggestion) + " not in vocabulary");
  out.insert(out.end(), {vocab.score_open(), score ? vocab.correct() : vocab.incorrect(),
                         vocab.score_close(), vocab.sugg_open(), *act, vocab.sugg_close(),
                         vocab.eos()});
  return out;
}

std::string render(const Vocab& vocab, std::span<const TokenId> tokens) {
  std::string out;
  for (auto t : tokens) {
    if (!out.empty()) out += ' ';
    out += t < vocab.size() ? vocab.token_name(t) : "<?" + std::to_string(t) + ">";
  }
  return out;
}

}  // namespace precritic
