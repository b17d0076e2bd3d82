#include <cmath>

#include "doctest.h"
#include "policy_fixtures.hpp"
#include "precritic/critic.hpp"
#include "precritic/error.hpp"
#include "precritic/grpo.hpp"
#include "precritic/rewards.hpp"
#include "support.hpp"

using namespace precritic;

TEST_CASE("combined reward at the default weights") {
  const TrainConfig cfg;
  CHECK(combine_rewards(cfg, 1, 1, 1) == 1.0);
  CHECK(combine_rewards(cfg, 1, 1, 0) == 0.9);
  CHECK(combine_rewards(cfg, 1, 0, 1) == 0.2);
  CHECK(combine_rewards(cfg, 0, 0, 0) == 0.0);
}

TEST_CASE("group advantages use the population standard deviation") {
  CHECK(group_advantages(std::vector<double>{1, 0}) == std::vector<double>{1, -1});
  CHECK(group_advantages(std::vector<double>{1, 1, 0, 0}) == std::vector<double>{1, 1, -1, -1});
  CHECK(group_advantages(std::vector<double>{0.3, 0.3, 0.3}) == std::vector<double>{0, 0, 0});
  const auto a = group_advantages(std::vector<double>{0.2, 0.9, 1.0, 0.0, 0.9, 0.1});
  double mean = 0.0, sq = 0.0;
  for (double x : a) mean += x;
  for (double x : a) sq += x * x;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sq / 6.0 == doctest::Approx(1.0));
}

TEST_CASE("KL term") {
  CHECK(kl_term(1.0) == 0.0);
  CHECK(std::abs(kl_term(2.0) - (1.0 - std::log(2.0))) < 1e-12);
  // 0.3068528 is 1 - ln 2 rounded to seven places.
  CHECK(std::abs(kl_term(2.0) - 0.3068528) < 5e-8);
  CHECK(kl_term(0.5) == doctest::Approx(0.5 - std::log(0.5) - 1.0));
  CHECK_THROWS_AS(kl_term(0.0), std::domain_error);
  CHECK_THROWS_AS(kl_term(-1.0), std::domain_error);
  for (double r = 0.05; r < 20; r *= 1.3) CHECK(kl_term(r) >= 0.0);
}

TEST_CASE("format, accuracy and suggestion rewards") {
  const World w = testing::fixture("diamond");
  const World* ptr = &w;
  const Vocab v = Vocab::from_worlds(std::span(&ptr, 1));
  const auto s0 = initial_state(w, 0);

  const auto full = encode(v, 1, Action::click("a"), Thinking{"s0", "s1", 1});
  CHECK(reward_format(v, full) == 1);
  auto truncated = full;
  truncated.pop_back();
  CHECK(reward_format(v, truncated) == 0);

  const auto parsed = parse(v, full);
  CHECK(reward_accuracy(parsed, 1) == 1);
  CHECK(reward_accuracy(parsed, 0) == 0);
  CHECK(reward_accuracy(std::nullopt, 1) == 0);

  CHECK(reward_suggestion(parsed, Action::click("a"), w, s0) == 1);
  // The other optimal branch is similar.
  CHECK(reward_suggestion(parsed, Action::click("b"), w, s0) == 1);
  const auto back = parse(v, encode(v, 0, Action::back()));
  CHECK(reward_suggestion(back, Action::click("a"), w, s0) == 0);
  CHECK(reward_suggestion(std::nullopt, Action::click("a"), w, s0) == 0);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  c.validate();
  c.lambda_f = 0.5;
  c.lambda_s = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.group_size = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.clip = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.beta = -1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS_AS(train_config_from_json(nlohmann::json{{"bogus", 1}}), ParseError);
  CHECK(to_json(train_config_from_json(to_json(TrainConfig{}))) == to_json(TrainConfig{}));
}

namespace {

std::vector<OutputRecord> random_outputs(const CriticPolicy& old, const CriticPolicy& ref,
                                         const FeatureVector& fv, std::uint64_t seed,
                                         std::size_t n) {
  std::vector<OutputRecord> outs(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> adv(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    outs[i].tokens = testing::random_tokens(seed * 31 + i, old.vocab_size(), 2 + (seed + i) % 7);
    outs[i].logprob_old = logprob(old, fv, outs[i].tokens);
    outs[i].logprob_ref = logprob(ref, fv, outs[i].tokens);
    outs[i].advantage = adv(rng);
  }
  return outs;
}

CriticPolicy perturbed(const CriticPolicy& p, std::uint64_t seed, double scale) {
  auto noise = testing::random_policy(seed, p.vocab_size(), p.feature_dim(), scale);
  CriticPolicy out = p;
  for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] += noise.raw()[i];
  return out;
}

}  // namespace

TEST_CASE("S-GRPO objective gradient matches central differences") {
  TrainConfig cfg;
  cfg.group_size = 2;
  cfg.beta = 0.1;
  for (std::uint64_t point = 0; point < 10; ++point) {
    const auto policy = testing::random_policy(500 + point, 6, 5, 0.5);
    const auto old = perturbed(policy, 600 + point, 0.05);
    const auto ref = perturbed(policy, 700 + point, 0.3);
    const auto fv = testing::random_features(800 + point);
    const auto outs = random_outputs(old, ref, fv, 900 + point, 2);
    const auto g = group_objective(policy, outs, fv, cfg);
    const auto numeric = testing::numeric_gradient(policy, [&](const CriticPolicy& q) {
      return group_objective(q, outs, fv, cfg).objective;
    });
    CAPTURE(point);
    CHECK(testing::relative_error(g.grad.dense(policy.columns()), numeric) < 1e-4);
  }
}

TEST_CASE("logged surrogate equals min(ratio*A, clip(ratio)*A)") {
  TrainConfig cfg;
  const auto policy = testing::random_policy(41, 6, 5, 0.5);
  const auto old = perturbed(policy, 42, 0.4);
  const auto fv = testing::random_features(43);
  const auto g = group_objective(policy, random_outputs(old, policy, fv, 44, 32), fv, cfg);
  int clipped = 0;
  for (const auto& o : g.outputs) {
    const double r = std::exp(o.logprob - o.logprob_old);
    CHECK(o.ratio == doctest::Approx(r));
    const double expect =
        std::min(o.ratio * o.advantage, std::clamp(o.ratio, 1 - cfg.clip, 1 + cfg.clip) * o.advantage);
    CHECK(o.surrogate == doctest::Approx(expect));
    clipped += o.clipped;
  }
  CHECK(clipped > 0);
}

TEST_CASE("on-policy outputs sit on the unclipped branch") {
  TrainConfig cfg;
  const auto policy = testing::random_policy(45);
  const auto fv = testing::random_features(46);
  auto outs = random_outputs(policy, policy, fv, 47, 6);
  for (auto& o : outs) o.advantage = std::abs(o.advantage) + 0.1;
  const auto g = group_objective(policy, outs, fv, cfg);
  for (const auto& o : g.outputs) {
    CHECK(o.ratio == doctest::Approx(1.0));
    CHECK_FALSE(o.clipped);
    CHECK(o.surrogate == doctest::Approx(o.advantage));
    CHECK(o.kl == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("zero advantages leave only the KL gradient") {
  TrainConfig cfg;
  cfg.beta = 0.05;
  const auto policy = testing::random_policy(48, 6, 5, 0.5);
  const auto ref = perturbed(policy, 49, 0.3);
  const auto fv = testing::random_features(50);
  auto outs = random_outputs(policy, ref, fv, 51, 4);
  for (auto& o : outs) o.advantage = 0.0;
  const auto g = group_objective(policy, outs, fv, cfg);
  const auto kl_only = testing::numeric_gradient(policy, [&](const CriticPolicy& q) {
    double total = 0.0;
    for (const auto& o : outs) total -= cfg.beta * kl_term(std::exp(o.logprob_ref - logprob(q, fv, o.tokens)));
    return total;
  });
  CHECK(testing::relative_error(g.grad.dense(policy.columns()), kl_only) < 1e-4);

  cfg.beta = 0.0;
  const auto none = group_objective(policy, outs, fv, cfg);
  for (double x : none.grad.dense(policy.columns())) CHECK(x == 0.0);
}

TEST_CASE("sampled groups satisfy the reward decomposition and zero-mean advantages") {
  const World w = testing::fixture("diamond5");
  const World* ptr = &w;
  auto model = CriticModel::zero(Vocab::from_worlds(std::span(&ptr, 1)));
  TrainConfig cfg;
  const auto s0 = initial_state(w, 0);
  GrpoInput in{&w, s0, Action::click("b"), 0, Action::click("a"),
               model.features(w, s0, Action::click("b"))};
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto outs = sample_group(model.policy, model.policy, model.vocab, in, cfg, rng);
    REQUIRE(outs.size() == 6);
    double mean = 0.0;
    for (const auto& o : outs) {
      CHECK(o.reward.r == combine_rewards(cfg, o.reward.r_f, o.reward.r_a, o.reward.r_s));
      CHECK(o.logprob_old == doctest::Approx(logprob(model.policy, in.features, o.tokens)));
      mean += o.advantage;
    }
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
  }
}
