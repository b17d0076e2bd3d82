#include <set>

#include "doctest.h"
#include "precritic/grammar.hpp"
#include "precritic/vocab.hpp"

using namespace precritic;

namespace {

using Seq = std::vector<TokenId>;

// Every grammatical sequence, built from the grammar's choice points.
std::set<Seq> accepted_language(const Vocab& v) {
  std::vector<TokenId> obs, pred, acts;
  for (const auto& s : v.screens()) {
    obs.push_back(*v.obs(s));
    pred.push_back(*v.pred(s));
  }
  for (const auto& a : v.actions()) acts.push_back(*v.action_token(a));
  std::set<Seq> out;
  for (TokenId score : {v.correct(), v.incorrect()}) {
    for (TokenId act : acts) {
      const Seq tail{v.score_open(), score, v.score_close(), v.sugg_open(), act, v.sugg_close(), v.eos()};
      out.insert(tail);
      for (TokenId o : obs) {
        for (TokenId p : pred) {
          for (TokenId c : {v.crit_ok(), v.crit_bad()}) {
            Seq full{v.think_open(), o, p, c, v.think_close()};
            full.insert(full.end(), tail.begin(), tail.end());
            out.insert(full);
          }
        }
      }
    }
  }
  return out;
}

Vocab minimal_vocab() { return Vocab({"s0"}, {Action::done()}); }

}  // namespace

TEST_CASE("minimal vocabulary has fourteen tokens in grammar order") {
  const Vocab v = minimal_vocab();
  REQUIRE(v.size() == 14);
  CHECK(v.think_open() == 0);
  CHECK(v.kind(1) == TokenKind::Obs);
  CHECK(v.kind(2) == TokenKind::Pred);
  CHECK(v.kind(v.sugg_open() + 1) == TokenKind::Act);
  CHECK(v.eos() == 13);
}

TEST_CASE("parse accepts exactly the grammar: exhaustive up to length 7") {
  const Vocab v = minimal_vocab();
  const auto lang = accepted_language(v);
  const std::size_t V = v.size();
  std::size_t accepted = 0;
  Seq seq;
  for (std::size_t len = 0; len <= 7; ++len) {
    seq.assign(len, 0);
    while (true) {
      // Accepted strings must belong to the language; the count check below
      // then gives equality on this finite domain.
      if (parse(v, seq)) {
        if (!lang.contains(seq)) FAIL_CHECK("accepted outside the grammar: " << render(v, seq));
        ++accepted;
      }
      std::size_t i = 0;
      while (i < len && ++seq[i] == V) seq[i++] = 0;
      if (i == len) break;
    }
  }
  std::size_t expected = 0;
  for (const auto& x : lang) expected += x.size() <= 7;
  CHECK(expected == 2);  // two scores, one suggestion, short form only
  CHECK(accepted == expected);
}

TEST_CASE("every single-token mutation of a valid output is judged like the language") {
  const Vocab v({"a", "b", "c"}, {Action::click("x"), Action::back(), Action::done()});
  const auto lang = accepted_language(v);
  const auto V = static_cast<TokenId>(v.size());
  std::size_t checked = 0;
  for (const auto& base : lang) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (TokenId t = 0; t < V + 1; ++t) {  // V is out of range
        Seq sub = base;
        sub[i] = t;
        CHECK(parse(v, sub).has_value() == lang.contains(sub));
        Seq ins = base;
        ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(i), t);
        CHECK(parse(v, ins).has_value() == lang.contains(ins));
        ++checked;
      }
      Seq del = base;
      del.erase(del.begin() + static_cast<std::ptrdiff_t>(i));
      CHECK(parse(v, del).has_value() == lang.contains(del));
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("encode and parse are inverse") {
  const Vocab v({"a", "b"}, {Action::click("x"), Action::scroll("down"), Action::done()});
  for (const auto& act : v.actions()) {
    for (int score : {0, 1}) {
      const auto short_form = encode(v, score, act);
      CHECK(short_form.size() == kShortOutputLength);
      const auto p = parse(v, short_form);
      REQUIRE(p);
      CHECK(p->score == score);
      CHECK(p->suggestion == act);
      CHECK_FALSE(p->thinking);

      const Thinking th{"a", "b", 1 - score};
      const auto full = encode(v, score, act, th);
      CHECK(full.size() == kFullOutputLength);
      const auto q = parse(v, full);
      REQUIRE(q);
      CHECK(q->thinking == th);
      CHECK(q->suggestion == act);
    }
  }
}

TEST_CASE("suggestion block before score block is rejected") {
  const Vocab v = minimal_vocab();
  const Seq swapped{v.sugg_open(), *v.action_token(Action::done()), v.sugg_close(),
                    v.score_open(), v.correct(), v.score_close(), v.eos()};
  CHECK_FALSE(parse(v, swapped));
}

TEST_CASE("truncated output without EOS is rejected") {
  const Vocab v = minimal_vocab();
  auto seq = encode(v, 1, Action::done());
  seq.pop_back();
  CHECK_FALSE(parse(v, seq));
}

TEST_CASE("encode rejects symbols outside the vocabulary") {
  const Vocab v = minimal_vocab();
  CHECK_THROWS_AS(encode(v, 1, Action::click("nope")), std::invalid_argument);
  CHECK_THROWS_AS(encode(v, 1, Action::done(), Thinking{"zz", "s0", 1}), std::invalid_argument);
}

TEST_CASE("vocabulary ids are stable under input order") {
  const Vocab a({"b", "a"}, {Action::back(), Action::click("x")});
  const Vocab b({"a", "b", "a"}, {Action::click("x"), Action::back(), Action::done()});
  CHECK(a.size() == b.size());
  CHECK(a.hash() == b.hash());
  for (TokenId t = 0; t < a.size(); ++t) CHECK(a.token_name(t) == b.token_name(t));
}
