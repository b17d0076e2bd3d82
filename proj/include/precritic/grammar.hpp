#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precritic/action.hpp"
#include "precritic/vocab.hpp"

namespace precritic {

// Observation / possible result / critique triple carried by the thinking block.
struct Thinking {
  std::string observed;   // screen id
  std::string predicted;  // screen id after the action
  int critique = 0;       // 1 = CRIT_OK

  bool operator==(const Thinking&) const = default;
};

struct ParsedOutput {
  int score = 0;  // 1 iff CORRECT was emitted
  Action suggestion;
  std::optional<Thinking> thinking;

  bool operator==(const ParsedOutput&) const = default;
};

// Accepts exactly
//   [THINK_OPEN OBS PRED (CRIT_OK|CRIT_BAD) THINK_CLOSE]
//   SCORE_OPEN (CORRECT|INCORRECT) SCORE_CLOSE SUGG_OPEN ACT SUGG_CLOSE EOS
// Total: returns nullopt on any mismatch, including out-of-range ids.
std::optional<ParsedOutput> parse(const Vocab& vocab, std::span<const TokenId> tokens);

// Token sequence for a label/suggestion with optional thinking. Throws
// std::invalid_argument when a symbol is missing from the vocabulary.
std::vector<TokenId> encode(const Vocab& vocab, int score, const Action& suggestion,
                            const std::optional<Thinking>& thinking = std::nullopt);

std::string render(const Vocab& vocab, std::span<const TokenId> tokens);

inline constexpr std::size_t kShortOutputLength = 7;
inline constexpr std::size_t kFullOutputLength = 12;

}  // namespace precritic
