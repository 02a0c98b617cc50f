// Copyright 2026 The simplexrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "simplexrank/baselines.hpp"
#include "simplexrank/common.hpp"

using namespace simplexrank;

namespace {

ScoreRecord rec(const std::string& q, const std::string& j, const std::string& c,
                int level, const std::string& stratum = "default") {
  ScoreRecord r;
  r.question_id = q;
  r.judge_id = j;
  r.candidate_id = c;
  r.stratum = stratum;
  r.level = level;
  return r;
}

ScoreDataset dataset(int levels, std::vector<ScoreRecord> records) {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(levels, levels);
  ds.records = std::move(records);
  ds.default_families();
  return ds;
}

const CandidateSummary& row(const RankReport& rep, const std::string& id) {
  for (const CandidateSummary& c : rep.candidates)
    if (c.candidate_id == id) return c;
  REQUIRE(false);
  static CandidateSummary dummy;
  return dummy;
}

// Best Rao-Kupper fit for two candidates by a zooming grid over the worth
// split and the tie parameter, with the worths summing to two.
void grid_best_two(const PairwiseCounts& pc, double* best_a, double* best_nu) {
  double center_a = 1.0, radius_a = 0.98;
  double center_nu = 3.0, radius_nu = 2.5;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int stage = 0; stage < 5; ++stage) {
    double stage_a = center_a, stage_nu = center_nu;
    for (int ia = -40; ia <= 40; ++ia) {
      const double a = center_a + radius_a * ia / 40.0;
      if (a <= 1e-6 || a >= 2.0 - 1e-6) continue;
      Vec lambda(2);
      lambda << a, 2.0 - a;
      for (int iv = -40; iv <= 40; ++iv) {
        const double nu = center_nu + radius_nu * iv / 40.0;
        if (nu < 1.0 + 1e-9) continue;
        const double ll = rao_kupper_log_likelihood(pc, lambda, nu);
        if (ll > best_ll) {
          best_ll = ll;
          stage_a = a;
          stage_nu = nu;
        }
      }
    }
    center_a = stage_a;
    center_nu = stage_nu;
    radius_a /= 12.0;
    radius_nu /= 12.0;
  }
  *best_a = center_a;
  *best_nu = center_nu;
}

}  // namespace

TEST_CASE("simple average ranks constant scorers by their means") {
  ScoreDataset ds = dataset(3, {});
  for (int q = 0; q < 6; ++q) {
    ds.records.push_back(rec("q" + std::to_string(q), "j", "good", 3));
    ds.records.push_back(rec("q" + std::to_string(q), "j", "bad", 1));
  }
  RankReport rep = simple_average(ds);
  CHECK(row(rep, "good").score_mean == doctest::Approx(2.0));
  CHECK(row(rep, "bad").score_mean == doctest::Approx(0.0));
  CHECK(rep.candidates.front().candidate_id == "good");
  CHECK(row(rep, "good").rank_mean == doctest::Approx(1.0));
  CHECK(row(rep, "bad").rank_mean == doctest::Approx(2.0));
}

TEST_CASE("identical level multisets tie exactly") {
  ScoreDataset ds = dataset(5, {});
  // Same multiset {1, 3, 5} for both, distributed over different questions.
  int q = 0;
  for (int level : {1, 3, 5}) {
    ds.records.push_back(rec("qa" + std::to_string(q), "j", "one", level));
    ds.records.push_back(rec("qb" + std::to_string(q), "j", "two", level));
    ++q;
  }
  RankReport rep = simple_average(ds);
  CHECK(row(rep, "one").score_mean == doctest::Approx(row(rep, "two").score_mean));
  REQUIRE(rep.ranking.tie_groups.size() == 1);
  CHECK(rep.ranking.tie_groups[0].size() == 2);
  CHECK(row(rep, "one").rank_mean == doctest::Approx(1.0));
  CHECK(row(rep, "two").rank_mean == doctest::Approx(1.0));
}

TEST_CASE("simple average matches a direct recount") {
  std::mt19937_64 rng = make_rng(31);
  std::uniform_int_distribution<int> level(1, 5);
  ScoreDataset ds = dataset(5, {});
  std::map<std::string, std::vector<double>> values;
  for (int q = 0; q < 40; ++q) {
    for (const std::string& c : {"a", "b", "c"}) {
      int l = level(rng);
      ds.records.push_back(rec("q" + std::to_string(q), "j" + std::to_string(q % 2),
                               c, l));
      values[c].push_back(static_cast<double>(l - 1));
    }
  }
  RankReport rep = simple_average(ds);

  std::map<std::string, double> means;
  for (const auto& [id, vs] : values) {
    double mean = 0.0;
    for (double v : vs) mean += v;
    mean /= static_cast<double>(vs.size());
    means[id] = mean;
    double ss = 0.0;
    for (double v : vs) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(vs.size() - 1));
    double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(vs.size()));

    const CandidateSummary& cs = row(rep, id);
    CHECK(cs.score_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(cs.score_lo == doctest::Approx(mean - half).epsilon(1e-12));
    CHECK(cs.score_hi == doctest::Approx(mean + half).epsilon(1e-12));
  }
  // Rank bounds follow from comparing other candidates' point means to the
  // score interval.
  for (const auto& [id, mean] : means) {
    (void)mean;
    const CandidateSummary& cs = row(rep, id);
    int above_hi = 0, above_lo = 0;
    for (const auto& [other, m] : means) {
      if (other == id) continue;
      if (m > cs.score_hi) ++above_hi;
      if (m > cs.score_lo) ++above_lo;
    }
    CHECK(cs.rank_lo == 1 + above_hi);
    CHECK(cs.rank_hi == 1 + above_lo);
  }
}

TEST_CASE("record order does not change the average report") {
  std::mt19937_64 rng = make_rng(33);
  std::uniform_int_distribution<int> level(1, 4);
  ScoreDataset ds = dataset(4, {});
  for (int q = 0; q < 25; ++q)
    for (const std::string& c : {"x", "y"})
      ds.records.push_back(rec("q" + std::to_string(q), "j", c, level(rng)));
  ScoreDataset shuffled = ds;
  std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);

  CHECK(simple_average(ds).to_json() == simple_average(shuffled).to_json());
  CHECK(bootstrap_rank_ci(ds, 200, 5).to_json() ==
        bootstrap_rank_ci(shuffled, 200, 5).to_json());
  PairwiseCounts a = pairwise_from_dataset(ds);
  PairwiseCounts b = pairwise_from_dataset(shuffled);
  CHECK(a.wins == b.wins);
  CHECK(a.ties == b.ties);
}

TEST_CASE("single judge pooling equals the simple average") {
  std::mt19937_64 rng = make_rng(35);
  std::uniform_int_distribution<int> level(1, 5);
  ScoreDataset ds = dataset(5, {});
  for (int q = 0; q < 30; ++q)
    for (const std::string& j : {"j1", "j2"})
      for (const std::string& c : {"a", "b", "c"})
        ds.records.push_back(rec("q" + std::to_string(q), j, c, level(rng)));

  SingleJudgeResult sj = single_judge(ds);
  RankReport avg = simple_average(ds);
  CHECK(sj.pooled.method == "single_judge");
  REQUIRE(sj.pooled.candidates.size() == avg.candidates.size());
  for (std::size_t i = 0; i < avg.candidates.size(); ++i) {
    CHECK(sj.pooled.candidates[i].candidate_id == avg.candidates[i].candidate_id);
    CHECK(sj.pooled.candidates[i].score_mean == avg.candidates[i].score_mean);
    CHECK(sj.pooled.candidates[i].score_lo == avg.candidates[i].score_lo);
    CHECK(sj.pooled.candidates[i].score_hi == avg.candidates[i].score_hi);
  }

  // Each judge section is the simple average of that judge's records.
  REQUIRE(sj.per_judge.size() == 2);
  for (const std::string& jid : {"j1", "j2"}) {
    ScoreDataset only = dataset(5, {});
    for (const auto& r : ds.records)
      if (r.judge_id == jid) only.records.push_back(r);
    RankReport want = simple_average(only);
    const RankReport& got = sj.per_judge.at(jid);
    CHECK(got.method == "single_judge:" + jid);
    REQUIRE(got.candidates.size() == want.candidates.size());
    for (std::size_t i = 0; i < want.candidates.size(); ++i) {
      CHECK(got.candidates[i].candidate_id == want.candidates[i].candidate_id);
      CHECK(got.candidates[i].score_mean == want.candidates[i].score_mean);
    }
  }
}

TEST_CASE("judges with disjoint candidate pools keep separate sections") {
  ScoreDataset ds = dataset(3, {rec("q1", "j1", "a", 3), rec("q1", "j1", "b", 1),
                                rec("q2", "j2", "b", 2), rec("q2", "j2", "c", 2)});
  SingleJudgeResult sj = single_judge(ds);
  CHECK(sj.per_judge.at("j1").candidates.size() == 2);
  CHECK(sj.per_judge.at("j2").candidates.size() == 2);
  CHECK(sj.pooled.candidates.size() == 3);
  CHECK(sj.per_judge.at("j1").candidates.front().candidate_id == "a");
}

TEST_CASE("bootstrap separates well separated candidates cleanly") {
  std::mt19937_64 rng = make_rng(37);
  std::uniform_int_distribution<int> hi(4, 5), lo(1, 2);
  ScoreDataset ds = dataset(5, {});
  for (int q = 0; q < 60; ++q) {
    ds.records.push_back(rec("q" + std::to_string(q), "j", "strong", hi(rng)));
    ds.records.push_back(rec("q" + std::to_string(q), "j", "weak", lo(rng)));
  }
  RankReport rep = bootstrap_rank_ci(ds, 1000, 11);
  CHECK(rep.extras.at("replicates") == doctest::Approx(1000.0));
  CHECK(row(rep, "strong").rank_lo == 1);
  CHECK(row(rep, "strong").rank_hi == 1);
  CHECK(row(rep, "weak").rank_lo == 2);
  CHECK(row(rep, "weak").rank_hi == 2);
  CHECK(row(rep, "strong").score_lo > row(rep, "weak").score_hi);
}

TEST_CASE("one question leaves the bootstrap nothing to vary") {
  ScoreDataset ds = dataset(5, {rec("q", "j", "a", 4), rec("q", "j", "b", 2)});
  RankReport rep = bootstrap_rank_ci(ds, 300, 1);
  CHECK(row(rep, "a").score_lo == doctest::Approx(3.0));
  CHECK(row(rep, "a").score_hi == doctest::Approx(3.0));
  CHECK(row(rep, "a").rank_lo == 1);
  CHECK(row(rep, "a").rank_hi == 1);
  CHECK(row(rep, "b").score_lo == doctest::Approx(1.0));
  CHECK(row(rep, "b").score_hi == doctest::Approx(1.0));
}

TEST_CASE("bootstrap is deterministic in the seed") {
  std::mt19937_64 rng = make_rng(39);
  std::uniform_int_distribution<int> level(1, 5);
  ScoreDataset ds = dataset(5, {});
  for (int q = 0; q < 20; ++q)
    for (const std::string& c : {"a", "b"})
      ds.records.push_back(rec("q" + std::to_string(q), "j", c, level(rng)));
  CHECK(bootstrap_rank_ci(ds, 400, 7).to_json() ==
        bootstrap_rank_ci(ds, 400, 7).to_json());
}

TEST_CASE("pairwise counts tally same question same judge pairs") {
  ScoreDataset ds = dataset(5, {});
  // q1/j1: a=5, b=3, c=3 -> a beats b, a beats c, b ties c.
  ds.records.push_back(rec("q1", "j1", "a", 5));
  ds.records.push_back(rec("q1", "j1", "b", 3));
  ds.records.push_back(rec("q1", "j1", "c", 3));
  // q1/j2: b=4, a=2 -> b beats a.  Different judge, separate comparison.
  ds.records.push_back(rec("q1", "j2", "a", 2));
  ds.records.push_back(rec("q1", "j2", "b", 4));
  // q2/j1: a=1, c=1 -> tie.
  ds.records.push_back(rec("q2", "j1", "a", 1));
  ds.records.push_back(rec("q2", "j1", "c", 1));
  // Same candidate across different questions never pairs with itself.
  ds.records.push_back(rec("q3", "j1", "a", 5));

  PairwiseCounts pc = pairwise_from_dataset(ds);
  REQUIRE(pc.ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(pc.wins(0, 1) == doctest::Approx(1.0));
  CHECK(pc.wins(1, 0) == doctest::Approx(1.0));
  CHECK(pc.wins(0, 2) == doctest::Approx(1.0));
  CHECK(pc.wins(2, 0) == doctest::Approx(0.0));
  CHECK(pc.ties(1, 2) == doctest::Approx(1.0));
  CHECK(pc.ties(2, 1) == doctest::Approx(1.0));
  CHECK(pc.ties(0, 2) == doctest::Approx(1.0));
  CHECK(pc.wins(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("worths order a dominant candidate first") {
  ScoreDataset ds = dataset(3, {});
  for (int q = 0; q < 10; ++q) {
    ds.records.push_back(rec("q" + std::to_string(q), "j", "top", 3));
    ds.records.push_back(rec("q" + std::to_string(q), "j", "mid", 2));
    ds.records.push_back(rec("q" + std::to_string(q), "j", "low", 1));
  }
  BradleyTerryResult bt = bradley_terry_ties(ds, 100, 3);
  REQUIRE(bt.ids == std::vector<std::string>{"low", "mid", "top"});
  CHECK(bt.lambda[2] > bt.lambda[1]);
  CHECK(bt.lambda[1] > bt.lambda[0]);
  CHECK(bt.report.candidates.front().candidate_id == "top");
  CHECK(row(bt.report, "top").rank_lo == 1);
  CHECK(row(bt.report, "top").rank_hi == 1);
  CHECK(row(bt.report, "low").rank_lo == 3);
  CHECK(row(bt.report, "low").rank_hi == 3);
}

TEST_CASE("all tied comparisons keep equal worths and a heavy tie parameter") {
  PairwiseCounts pc;
  pc.ids = {"a", "b"};
  pc.wins = Mat::Zero(2, 2);
  pc.ties = Mat::Zero(2, 2);
  pc.ties(0, 1) = pc.ties(1, 0) = 10.0;
  BradleyTerryResult bt = fit_rao_kupper(pc);
  CHECK(bt.lambda[0] == doctest::Approx(bt.lambda[1]));
  CHECK(bt.nu > 1.5);
  REQUIRE(bt.report.ranking.tie_groups.size() == 1);
  CHECK(bt.report.ranking.tie_groups[0].size() == 2);
}

TEST_CASE("the fitted worths match a dense grid search") {
  PairwiseCounts pc;
  pc.ids = {"a", "b"};
  pc.wins = Mat::Zero(2, 2);
  pc.ties = Mat::Zero(2, 2);
  pc.wins(0, 1) = 8.0;
  pc.wins(1, 0) = 2.0;
  pc.ties(0, 1) = pc.ties(1, 0) = 4.0;

  BradleyTerryResult bt = fit_rao_kupper(pc);
  double grid_a = 0.0, grid_nu = 0.0;
  grid_best_two(pc, &grid_a, &grid_nu);
  CHECK(std::abs(bt.lambda[0] - grid_a) < 1e-3);
  CHECK(std::abs(bt.nu - grid_nu) < 1e-3);
  CHECK(bt.lambda.sum() == doctest::Approx(2.0));

  // The fit never scores below the grid optimum.
  CHECK(rao_kupper_log_likelihood(pc, bt.lambda, bt.nu) >=
        rao_kupper_log_likelihood(pc, (Vec(2) << grid_a, 2.0 - grid_a).finished(),
                                  grid_nu) -
            1e-9);
}

TEST_CASE("likelihood climbs monotonically over fit iterations") {
  PairwiseCounts pc;
  pc.ids = {"a", "b", "c"};
  pc.wins = Mat::Zero(3, 3);
  pc.ties = Mat::Zero(3, 3);
  pc.wins(0, 1) = 8.0;
  pc.wins(1, 0) = 2.0;
  pc.ties(0, 1) = pc.ties(1, 0) = 3.0;
  pc.wins(1, 2) = 7.0;
  pc.wins(2, 1) = 3.0;
  pc.ties(1, 2) = pc.ties(2, 1) = 2.0;
  pc.wins(0, 2) = 9.0;
  pc.wins(2, 0) = 1.0;
  pc.ties(0, 2) = pc.ties(2, 0) = 1.0;

  double prev = -std::numeric_limits<double>::infinity();
  for (int iters = 1; iters <= 10; ++iters) {
    BradleyTerryResult bt = fit_rao_kupper(pc, iters);
    double ll = rao_kupper_log_likelihood(pc, bt.lambda, bt.nu);
    CHECK(ll >= prev - 1e-9);
    prev = ll;
  }
}

TEST_CASE("disconnected comparison graphs rank component by component") {
  ScoreDataset ds = dataset(3, {});
  for (int q = 0; q < 8; ++q) {
    ds.records.push_back(rec("qa" + std::to_string(q), "j", "a", 3));
    ds.records.push_back(rec("qa" + std::to_string(q), "j", "b", 1));
    ds.records.push_back(rec("qb" + std::to_string(q), "j", "c", 3));
    ds.records.push_back(rec("qb" + std::to_string(q), "j", "d", 1));
  }
  BradleyTerryResult bt = bradley_terry_ties(ds, 50, 9);
  REQUIRE(bt.components.size() == 2);
  CHECK(bt.components[0] == std::vector<std::string>{"a", "b"});
  CHECK(bt.components[1] == std::vector<std::string>{"c", "d"});
  CHECK(bt.report.ranking.order ==
        std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(bt.report.extras.at("components") == doctest::Approx(2.0));
}

TEST_CASE("degenerate inputs are rejected") {
  ScoreDataset empty = dataset(3, {});
  CHECK_THROWS_AS(simple_average(empty), Error);
  CHECK_THROWS_AS(bootstrap_rank_ci(empty, 0, 0), Error);

  PairwiseCounts pc;
  pc.ids = {"only"};
  pc.wins = Mat::Zero(1, 1);
  pc.ties = Mat::Zero(1, 1);
  CHECK_THROWS_AS(fit_rao_kupper(pc), Error);

  PairwiseCounts two;
  two.ids = {"a", "b"};
  two.wins = Mat::Zero(2, 2);
  two.ties = Mat::Zero(2, 2);
  two.wins(0, 1) = 1.0;
  Vec lambda(1);
  lambda << 1.0;
  CHECK_THROWS_AS(rao_kupper_log_likelihood(two, lambda, 1.2), Error);
  Vec ok(2);
  ok << 1.0, 1.0;
  CHECK_THROWS_AS(rao_kupper_log_likelihood(two, ok, 0.5), Error);
}
