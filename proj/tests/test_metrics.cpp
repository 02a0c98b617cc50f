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

#include <string>
#include <vector>

#include "simplexrank/common.hpp"
#include "simplexrank/metrics.hpp"
#include "simplexrank/summary.hpp"

using namespace simplexrank;

namespace {

Ranking ranking_of(const std::vector<std::vector<std::string>>& groups) {
  Ranking r;
  r.tie_groups = groups;
  for (const auto& g : groups)
    for (const auto& id : g) r.order.push_back(id);
  return r;
}

RankReport report_with(const std::vector<std::tuple<std::string, int, int>>& rows) {
  RankReport rep;
  for (const auto& [id, lo, hi] : rows) {
    CandidateSummary cs;
    cs.candidate_id = id;
    cs.rank_lo = lo;
    cs.rank_hi = hi;
    rep.candidates.push_back(cs);
  }
  return rep;
}

ScoreRecord rec(const std::string& q, const std::string& c, int level) {
  ScoreRecord r;
  r.question_id = q;
  r.judge_id = "j";
  r.candidate_id = c;
  r.stratum = "default";
  r.level = level;
  return r;
}

}  // namespace

TEST_CASE("rank correlation hits the textbook values") {
  CHECK(spearman({1, 2, 3, 4}, {1, 2, 3, 4}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
  // Monotone transforms of the values do not matter.
  CHECK(spearman({0.1, 5.0, 7.2, 100.0}, {-3.0, 0.0, 1.0, 2.0}) ==
        doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3}, {2, 3, 1}) == doctest::Approx(spearman({2, 3, 1}, {1, 2, 3})));
}

TEST_CASE("rank correlation rejects degenerate input") {
  CHECK_THROWS_WITH_AS(spearman({1.0}, {2.0}), doctest::Contains("two points"),
                       Error);
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_WITH_AS(spearman({2, 2, 2}, {1, 2, 3}),
                       doctest::Contains("constant"), Error);
}

TEST_CASE("ranking overload aligns ids and averages ties") {
  Ranking a = ranking_of({{"x"}, {"y"}, {"z"}});
  Ranking b = ranking_of({{"x"}, {"y"}, {"z"}});
  CHECK(spearman(a, b) == doctest::Approx(1.0));

  Ranking rev = ranking_of({{"z"}, {"y"}, {"x"}});
  CHECK(spearman(a, rev) == doctest::Approx(-1.0));

  // A two-way tie gets the average position in both computations.
  Ranking tied = ranking_of({{"x", "y"}, {"z"}});
  CHECK(spearman(tied, tied) == doctest::Approx(1.0));
  CHECK(spearman(a, tied) == doctest::Approx(spearman({1, 2, 3}, {1.5, 1.5, 3})));

  Ranking other = ranking_of({{"x"}, {"w"}});
  CHECK_THROWS_AS(spearman(a, other), Error);
}

TEST_CASE("interval coverage counts inclusively") {
  std::vector<std::pair<double, double>> wide = {{1, 5}, {1, 5}, {1, 5}};
  CHECK(coverage(wide, {1, 3, 5}) == doctest::Approx(1.0));

  std::vector<std::pair<double, double>> wrong = {{2, 2}, {3, 3}};
  CHECK(coverage(wrong, {1, 4}) == doctest::Approx(0.0));

  std::vector<std::pair<double, double>> mixed = {{0, 1}, {2, 3}, {4, 5}};
  CHECK(coverage(mixed, {0.5, 3.0, 5.5}) == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(coverage(mixed, {1.0}), Error);
}

TEST_CASE("rank coverage averages over reports against true ranks") {
  Ranking truth = ranking_of({{"a"}, {"b"}, {"c"}});  // ranks 1, 2, 3

  RankReport all = report_with({{"a", 1, 1}, {"b", 1, 2}, {"c", 2, 3}});
  CHECK(rank_coverage({&all}, truth) == doctest::Approx(1.0));

  RankReport partial = report_with({{"a", 2, 3}, {"b", 2, 2}, {"c", 3, 3}});
  CHECK(rank_coverage({&partial}, truth) == doctest::Approx(2.0 / 3.0));

  CHECK(rank_coverage({&all, &partial}, truth) == doctest::Approx(5.0 / 6.0));

  RankReport unknown = report_with({{"zzz", 1, 1}});
  CHECK_THROWS_WITH_AS(rank_coverage({&unknown}, truth),
                       doctest::Contains("zzz"), Error);
  CHECK_THROWS_AS(rank_coverage({}, truth), Error);

  // Ties in the truth use competition ranks.
  Ranking tied = ranking_of({{"a", "b"}, {"c"}});  // ranks 1, 1, 3
  RankReport third = report_with({{"a", 1, 1}, {"b", 2, 2}, {"c", 3, 3}});
  CHECK(rank_coverage({&third}, tied) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("named collapse maps fold the six point scale") {
  CollapseMap tldr = CollapseMap::named("tldr");
  CHECK(tldr.out_levels == 3);
  CHECK(tldr.to_level == std::vector<int>{2, 1, 1, 2, 2, 3});

  CollapseMap mtb = CollapseMap::named("mtbench");
  CHECK(mtb.out_levels == 3);
  CHECK(mtb.to_level == std::vector<int>{2, 1, 1, 2, 3, 3});

  CHECK_THROWS_AS(CollapseMap::named("nope"), Error);
}

TEST_CASE("collapse map parsing round trips the named maps") {
  CollapseMap parsed = CollapseMap::parse("2,1,1,2,2,3");
  CHECK(parsed.to_level == CollapseMap::named("tldr").to_level);
  CHECK(parsed.out_levels == 3);
  CHECK_THROWS_AS(CollapseMap::parse(""), Error);
  CHECK_THROWS_AS(CollapseMap::parse("1,x,2"), Error);
  // A map that skips an output level is invalid.
  CHECK_THROWS_WITH_AS(CollapseMap::parse("1,3,3"), doctest::Contains("skips"),
                       Error);
  CHECK_THROWS_AS(CollapseMap::parse("0,1,2"), Error);
}

TEST_CASE("collapsing rewrites levels and tightens the rubric") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(6, 6);
  // Raw 0..5 scores live on levels 1..6.
  for (int raw = 0; raw <= 5; ++raw)
    ds.records.push_back(rec("q" + std::to_string(raw), "cand", raw + 1));
  ds.default_families();

  ScoreDataset out = collapse_scores(ds, CollapseMap::named("tldr"));
  CHECK(out.rubric.assigned_levels == 3);
  CHECK(out.rubric.true_levels == 3);
  REQUIRE(out.records.size() == ds.records.size());
  std::vector<int> got;
  for (const auto& r : out.records) got.push_back(r.level);
  CHECK(got == std::vector<int>{2, 1, 1, 2, 2, 3});

  ScoreDataset mtb = collapse_scores(ds, CollapseMap::named("mtbench"));
  std::vector<int> got2;
  for (const auto& r : mtb.records) got2.push_back(r.level);
  CHECK(got2 == std::vector<int>{2, 1, 1, 2, 3, 3});
}

TEST_CASE("identity collapse changes nothing and is idempotent") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(4, 4);
  for (int q = 0; q < 8; ++q) ds.records.push_back(rec("q" + std::to_string(q), "c", 1 + q % 4));
  ds.default_families();

  ScoreDataset once = collapse_scores(ds, CollapseMap::identity(4));
  REQUIRE(once.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    CHECK(once.records[i].level == ds.records[i].level);
  CHECK(once.rubric.assigned_levels == 4);

  ScoreDataset twice = collapse_scores(once, CollapseMap::identity(4));
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    CHECK(twice.records[i].level == ds.records[i].level);
}

TEST_CASE("collapse rejects maps and records that do not fit") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(6, 6);
  ds.records.push_back(rec("q", "c", 6));
  ds.default_families();
  // Map sized for a four level rubric cannot apply to six.
  CHECK_THROWS_AS(collapse_scores(ds, CollapseMap::identity(4)), Error);

  ScoreDataset bad;
  bad.rubric = RubricSpec::make(3, 3);
  bad.records.push_back(rec("q", "c", 3));
  bad.records.back().level = 9;
  bad.default_families();
  CHECK_THROWS_WITH_AS(collapse_scores(bad, CollapseMap::identity(3)),
                       doctest::Contains("outside"), Error);
}
