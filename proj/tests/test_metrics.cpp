#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "precritic/error.hpp"
#include "precritic/metrics.hpp"
#include "precritic/oracle.hpp"
#include "precritic/pipeline.hpp"
#include "support.hpp"

using namespace precritic;

namespace {

SuiteRow row(std::string config, std::string task, std::uint64_t seed, bool success, int steps) {
  SuiteRow r;
  r.config = std::move(config);
  r.world = "w";
  r.task = std::move(task);
  r.seed = seed;
  r.result.world = "w";
  r.result.task = r.task;
  r.result.success = success;
  r.result.steps = steps;
  return r;
}

struct EarFixture {
  std::vector<SuiteRow> baseline = {row("baseline", "t0", 0, true, 5),
                                    row("baseline", "t1", 0, false, 10),
                                    row("baseline", "t2", 0, true, 7)};
  std::vector<SuiteRow> critic = {row("pre", "t0", 0, true, 4), row("pre", "t1", 0, false, 8),
                                  row("pre", "t2", 0, true, 9)};
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("EAR on the hand-enumerated fixture") {
  EarFixture f;
  const auto e = ear(f.baseline, f.critic);
  REQUIRE(e.value);
  CHECK(*e.value == 2.0 / 3.0);
  CHECK(e.n_pairs == 3);
  CHECK(e.n_consistent == 3);
  CHECK(e.n_advantage == 2);

  // Pairing is by key, not by position.
  std::vector<std::size_t> idx = {0, 1, 2};
  do {
    std::vector<SuiteRow> c;
    for (auto i : idx) c.push_back(f.critic[i]);
    auto b = f.baseline;
    std::reverse(b.begin(), b.end());
    CHECK(*ear(b, c).value == 2.0 / 3.0);
  } while (std::next_permutation(idx.begin(), idx.end()));

  const auto successes_only = ear(f.baseline, f.critic, false);
  CHECK(successes_only.n_consistent == 2);
  CHECK(*successes_only.value == 0.5);
}

TEST_CASE("EAR edge cases") {
  EarFixture f;
  SUBCASE("identical step counts give zero") {
    CHECK(*ear(f.baseline, f.baseline).value == 0.0);
  }
  SUBCASE("no consistent pair is undefined, not zero") {
    std::vector<SuiteRow> flipped = f.baseline;
    for (auto& r : flipped) r.result.success = !r.result.success;
    const auto e = ear(f.baseline, flipped);
    CHECK_FALSE(e.value);
    CHECK(e.n_pairs == 3);
  }
  SUBCASE("unpaired keys are listed") {
    auto c = f.critic;
    c.back().task = "t9";
    try {
      (void)ear(f.baseline, c);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("baseline-only") != std::string::npos);
      CHECK(msg.find("t2") != std::string::npos);
      CHECK(msg.find("critic-only") != std::string::npos);
      CHECK(msg.find("t9") != std::string::npos);
    }
  }
  SUBCASE("duplicate keys are an error") {
    auto c = f.critic;
    c.push_back(c.front());
    CHECK_THROWS_AS(ear(f.baseline, c), ValidationError);
  }
}

TEST_CASE("success rate") {
  EarFixture f;
  CHECK(success_rate(f.baseline) == 2.0 / 3.0);
  std::vector<SuiteRow> all = f.critic;
  for (auto& r : all) r.result.success = true;
  CHECK(success_rate(all) == 1.0);
  for (auto& r : all) r.result.success = false;
  CHECK(success_rate(all) == 0.0);
  CHECK_THROWS_AS(success_rate(std::span<const SuiteRow>{}), ValidationError);
}

TEST_CASE("dynamic reports derive from the rows") {
  EarFixture f;
  std::vector<SuiteRow> rows = f.baseline;
  rows.insert(rows.end(), f.critic.begin(), f.critic.end());
  const auto reps = dynamic_reports(rows, "baseline");
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].config == "baseline");
  CHECK_FALSE(reps[0].ear);
  CHECK(reps[0].mean_steps == 22.0 / 3.0);
  CHECK(reps[1].config == "pre");
  CHECK(*reps[1].ear == 2.0 / 3.0);
  CHECK(reps[1].n_consistent == 3);
  CHECK(reps[1].sr == 2.0 / 3.0);
  CHECK(format_reports(reps, "csv") ==
        "config,sr,ear,n,n_consistent,mean_steps\n"
        "baseline,0.6666666666666666,,3,3,7.333333333333333\n"
        "pre,0.6666666666666666,0.6666666666666666,3,3,7.0\n");
}

namespace {

struct StaticFixture {
  WorldSet worlds;
  Dataset data;
  StaticFixture() {
    worlds.add(testing::fixture("diamond5"), Family::Mobile);
    const World& w = worlds.get("diamond5");
    data.samples = collect_positives(w, {0});
    Rng rng(1);
    for (const auto& s : sample_negatives(w, {initial_state(w, 0)}, {Action::click("a")},
                                          AgentPolicy::uniform(), rng, 100)) {
      data.samples.push_back(s);
    }
    data.canonicalize();
  }
};

}  // namespace

TEST_CASE("static metrics") {
  StaticFixture f;
  REQUIRE(f.data.size() == 6);  // 3 positives, 3 negatives
  REQUIRE(f.data.positives() == 3);

  const auto oracle = static_report(f.worlds, f.data, oracle_critic_fn(), "test-I");
  CHECK(oracle.critic_acc == 1.0);
  CHECK(oracle.sugg_acc == 1.0);
  CHECK(oracle.pos_pred_pos + oracle.pos_pred_neg + oracle.neg_pred_pos + oracle.neg_pred_neg +
            oracle.unparseable == oracle.n);

  const auto yes = static_report(f.worlds, f.data, constant_critic_fn(1), "test-I");
  CHECK(yes.critic_acc == 0.5);
  CHECK(yes.pos_pred_pos == 3);
  CHECK(yes.neg_pred_pos == 3);
  // Done is optimal only at the goal: one of the six samples.
  CHECK(yes.sugg_acc == 1.0 / 6.0);

  // Three right of four.
  Dataset four;
  four.samples.assign(f.data.samples.begin(), f.data.samples.begin() + 4);
  std::size_t pos = 0;
  for (const auto& s : four.samples) pos += s.label;
  CHECK(critic_accuracy(f.worlds, four, constant_critic_fn(1)) == static_cast<double>(pos) / 4);

  // The other optimal branch is still credited.
  WorldSet dw;
  dw.add(testing::fixture("diamond"), Family::Mobile);
  Dataset d;
  d.samples = collect_positives(dw.get("diamond"), {0});
  d.samples.resize(1);
  CHECK(suggestion_accuracy(dw, d, constant_critic_fn(1, Action::click("b"))) == 1.0);

  CHECK_THROWS_AS(static_report(f.worlds, Dataset{}, oracle_critic_fn(), "x"), ValidationError);
}

TEST_CASE("report emission is byte-stable") {
  StaticFixture f;
  const std::vector<StaticReport> reps = {
      static_report(f.worlds, f.data, oracle_critic_fn(), "test-I"),
      static_report(f.worlds, f.data, constant_critic_fn(1), "test-S")};
  const auto csv = format_reports(reps, "csv");
  CHECK(csv ==
        "split,critic_acc,sugg_acc,n\n"
        "test-I,1.0,1.0,6\n"
        "test-S,0.5,0.16666666666666666,6\n");
  const auto dir = std::filesystem::temp_directory_path() / "precritic_report_test";
  std::filesystem::create_directories(dir);
  emit_report(reps, dir / "a.json", "json");
  emit_report(reps, dir / "b.json", "json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
  CHECK(j.at(0).at("split") == "test-I");
  CHECK_THROWS_AS(format_reports(reps, "xml"), ValidationError);
  CHECK_THROWS_AS(emit_report(reps, dir / "c.txt", "yaml"), ValidationError);
  std::filesystem::remove_all(dir);
}
