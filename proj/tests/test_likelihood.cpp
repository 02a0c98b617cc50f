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
#include <vector>

#include "simplexrank/common.hpp"
#include "simplexrank/core_model.hpp"
#include "simplexrank/counts.hpp"
#include "simplexrank/geometry.hpp"
#include "simplexrank/posterior.hpp"
#include "simplexrank/prior.hpp"

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

// Random dataset over fixed judges/candidates with one stratum.
ScoreDataset random_dataset(int true_levels, int assigned_levels, int judges,
                            int candidates, int questions, std::mt19937_64& rng) {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(true_levels, assigned_levels);
  std::uniform_int_distribution<int> level(1, assigned_levels);
  for (int q = 0; q < questions; ++q) {
    for (int j = 0; j < judges; ++j) {
      for (int k = 0; k < candidates; ++k) {
        ds.records.push_back(rec("q" + std::to_string(q), "j" + std::to_string(j),
                                 "c" + std::to_string(k), level(rng)));
      }
    }
  }
  ds.default_families();
  return ds;
}

std::vector<JudgeVertices> random_vertices(int judges, int true_levels,
                                           int assigned_levels, std::mt19937_64& rng) {
  std::vector<JudgeVertices> out;
  for (int j = 0; j < judges; ++j) {
    Mat cols(assigned_levels, true_levels);
    for (int m = 0; m < true_levels; ++m) {
      Vec conc = Vec::Ones(assigned_levels);
      conc[std::min(m, assigned_levels - 1)] += 5.0;
      cols.col(m) = sample_dirichlet(conc, rng);
    }
    out.push_back(JudgeVertices::make(cols));
  }
  return out;
}

}  // namespace

TEST_CASE("tabulate counts every record once") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(2, 3);
  ds.records = {rec("q1", "j1", "c1", 1), rec("q1", "j1", "c2", 3),
                rec("q2", "j1", "c1", 2), rec("q1", "j2", "c1", 1),
                rec("q2", "j2", "c2", 2)};
  ds.default_families();

  SufficientCounts counts = tabulate(ds, true);
  REQUIRE(counts.strata.size() == 1);
  const StratumCounts& s = counts.strata[0];
  CHECK(s.stratum == "default");
  REQUIRE(s.judge_ids == std::vector<std::string>{"j1", "j2"});
  REQUIRE(s.candidate_ids == std::vector<std::string>{"c1", "c2"});
  CHECK(s.total == 5);
  CHECK(s.question_count == 2);
  CHECK(counts.total() == 5);

  CHECK(s.n[0](0, 0) == 1);  // j1 gave c1 level 1 once
  CHECK(s.n[0](0, 1) == 1);
  CHECK(s.n[0](1, 2) == 1);
  CHECK(s.n[1](0, 0) == 1);
  CHECK(s.n[1](1, 1) == 1);
  CHECK(s.n[0].sum() + s.n[1].sum() == 5);
}

TEST_CASE("tabulate is insensitive to record order") {
  std::mt19937_64 rng = make_rng(907);
  ScoreDataset ds = random_dataset(2, 2, 2, 3, 20, rng);
  ScoreDataset shuffled = ds;
  std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);

  SufficientCounts a = tabulate(ds, true);
  SufficientCounts b = tabulate(shuffled, true);
  REQUIRE(a.strata.size() == b.strata.size());
  for (std::size_t s = 0; s < a.strata.size(); ++s) {
    for (std::size_t j = 0; j < a.strata[s].n.size(); ++j)
      CHECK(a.strata[s].n[j] == b.strata[s].n[j]);
  }
}

TEST_CASE("self filter only bites when families collide") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(2, 2);
  ds.records = {rec("q1", "j1", "c1", 2), rec("q1", "j2", "c1", 1),
                rec("q1", "j1", "c2", 2), rec("q1", "j2", "c2", 1)};
  ds.judge_family = {{"j1", "famA"}, {"j2", "famB"}};
  ds.candidate_family = {{"c1", "famC"}, {"c2", "famA"}};

  SufficientCounts keep = tabulate(ds, false);
  SufficientCounts drop = tabulate(ds, true);
  CHECK(keep.total() == 4);
  CHECK(drop.total() == 3);
  CHECK_FALSE(keep.self_adjusted);
  CHECK(drop.self_adjusted);

  // Without overlaps the flag changes nothing.
  ds.candidate_family["c2"] = "famZ";
  CHECK(tabulate(ds, true).total() == tabulate(ds, false).total());
}

TEST_CASE("losing every record of a candidate is an error") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(2, 2);
  ds.records = {rec("q1", "j1", "c1", 2), rec("q1", "j2", "c2", 1)};
  ds.judge_family = {{"j1", "fam"}, {"j2", "other"}};
  ds.candidate_family = {{"c1", "fam"}, {"c2", "x"}};
  CHECK_THROWS_WITH_AS(tabulate(ds, true), doctest::Contains("c1"), Error);
  CHECK_NOTHROW(tabulate(ds, false));

  ScoreDataset empty;
  empty.rubric = RubricSpec::make(2, 2);
  CHECK_THROWS_AS(tabulate(empty, false), Error);
}

TEST_CASE("tabulate splits strata and matches a brute-force recount") {
  std::mt19937_64 rng = make_rng(911);
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(3, 3);
  std::uniform_int_distribution<int> level(1, 3);
  for (int q = 0; q < 15; ++q) {
    for (const std::string& s : {"s1", "s2"}) {
      for (const std::string& j : {"jA", "jB"}) {
        for (const std::string& c : {"cX", "cY", "cZ"}) {
          ds.records.push_back(rec("q" + std::to_string(q) + s, j, c, level(rng), s));
        }
      }
    }
  }
  ds.default_families();

  SufficientCounts counts = tabulate(ds, true);
  REQUIRE(counts.strata.size() == 2);
  CHECK(counts.strata[0].stratum == "s1");
  CHECK(counts.strata[1].stratum == "s2");
  CHECK(counts.all_candidates() == std::vector<std::string>{"cX", "cY", "cZ"});

  for (const StratumCounts& s : counts.strata) {
    CHECK(s.question_count == 15);
    for (std::size_t j = 0; j < s.judge_ids.size(); ++j) {
      for (std::size_t k = 0; k < s.candidate_ids.size(); ++k) {
        for (int l = 1; l <= 3; ++l) {
          std::int64_t want = 0;
          for (const auto& r : ds.records) {
            if (r.stratum == s.stratum && r.judge_id == s.judge_ids[j] &&
                r.candidate_id == s.candidate_ids[k] && r.level == l)
              ++want;
          }
          CHECK(s.n[j](k, l - 1) == want);
        }
      }
    }
  }
}

TEST_CASE("empirical and pooled marginals are per-record frequencies") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(2, 2);
  ds.records = {rec("q1", "j1", "c1", 2), rec("q2", "j1", "c1", 2),
                rec("q3", "j1", "c1", 1), rec("q1", "j2", "c1", 1)};
  ds.default_families();

  auto per_judge = empirical_marginals(ds);
  CHECK(per_judge.at("j1").at("c1")[1] == doctest::Approx(2.0 / 3));
  CHECK(per_judge.at("j2").at("c1")[1] == doctest::Approx(0.0));
  auto pooled = pooled_marginals(ds);
  CHECK(pooled.at("c1")[1] == doctest::Approx(0.5));
}

TEST_CASE("perfect judge likelihood collapses to log prevalence") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(3, 3);
  ds.records = {rec("q1", "j1", "c1", 2)};
  ds.default_families();
  SufficientCounts counts = tabulate(ds, false);

  std::vector<JudgeVertices> vertices = {JudgeVertices::make(Mat::Identity(3, 3))};
  Vec pi(3);
  pi << 0.5, 0.3, 0.2;
  double got = log_likelihood(counts.strata[0], vertices, {pi}, RandomEffects::none());
  CHECK(got == doctest::Approx(std::log(0.3)).epsilon(1e-12));
}

TEST_CASE("independent judges add their likelihood contributions") {
  std::mt19937_64 rng = make_rng(919);
  ScoreDataset ds = random_dataset(3, 3, 2, 3, 10, rng);

  ScoreDataset only1 = ds, only2 = ds;
  only1.records.erase(std::remove_if(only1.records.begin(), only1.records.end(),
                                     [](const ScoreRecord& r) { return r.judge_id == "j1"; }),
                      only1.records.end());
  only2.records.erase(std::remove_if(only2.records.begin(), only2.records.end(),
                                     [](const ScoreRecord& r) { return r.judge_id == "j0"; }),
                      only2.records.end());

  std::vector<JudgeVertices> vertices = random_vertices(2, 3, 3, rng);
  std::vector<Vec> prevs = {sample_dirichlet(Vec::Ones(3), rng),
                            sample_dirichlet(Vec::Ones(3), rng),
                            sample_dirichlet(Vec::Ones(3), rng)};

  double full = log_likelihood(tabulate(ds, false).strata[0], vertices, prevs,
                               RandomEffects::none());
  double part1 = log_likelihood(tabulate(only1, false).strata[0], {vertices[0]}, prevs,
                                RandomEffects::none());
  double part2 = log_likelihood(tabulate(only2, false).strata[0], {vertices[1]}, prevs,
                                RandomEffects::none());
  CHECK(full == doctest::Approx(part1 + part2).epsilon(1e-12));
}

TEST_CASE("likelihood matches a per-record latent enumeration") {
  std::mt19937_64 rng = make_rng(929);
  ScoreDataset ds = random_dataset(3, 4, 2, 3, 5, rng);
  SufficientCounts counts = tabulate(ds, false);
  const StratumCounts& s = counts.strata[0];

  std::vector<JudgeVertices> vertices = random_vertices(2, 3, 4, rng);
  std::vector<Vec> prevs;
  for (int k = 0; k < 3; ++k) prevs.push_back(sample_dirichlet(Vec::Ones(3), rng));

  RandomEffects re;
  re.z = {sample_dirichlet(Vec::Ones(3), rng), sample_dirichlet(Vec::Ones(3), rng),
          sample_dirichlet(Vec::Ones(3), rng)};
  re.w = Vec(3);
  re.w << 0.3, 0.7, 0.1;
  re.r = Vec(2);
  re.r << 0.6, 0.2;

  // Every record independently sums over its latent true level.
  double want = 0.0;
  for (const auto& r : ds.records) {
    int j = s.judge_index(r.judge_id);
    int k = s.candidate_index(r.candidate_id);
    Vec pi = (1.0 - re.w[k] * re.r[j]) * prevs[k] + re.w[k] * re.r[j] * re.z[k];
    double p = 0.0;
    for (int m = 0; m < 3; ++m) p += pi[m] * vertices[j].columns(r.level - 1, m);
    want += std::log(p);
  }

  double got = log_likelihood(s, vertices, prevs, re);
  CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("duplicating the data doubles the likelihood") {
  std::mt19937_64 rng = make_rng(937);
  ScoreDataset ds = random_dataset(2, 2, 2, 2, 12, rng);
  ScoreDataset doubled = ds;
  for (const auto& r : ds.records) {
    ScoreRecord copy = r;
    copy.question_id += "-dup";
    doubled.records.push_back(copy);
  }

  std::vector<JudgeVertices> vertices = random_vertices(2, 2, 2, rng);
  std::vector<Vec> prevs = {sample_dirichlet(Vec::Ones(2), rng),
                            sample_dirichlet(Vec::Ones(2), rng)};
  double one = log_likelihood(tabulate(ds, false).strata[0], vertices, prevs,
                              RandomEffects::none());
  double two = log_likelihood(tabulate(doubled, false).strata[0], vertices, prevs,
                              RandomEffects::none());
  CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
}

TEST_CASE("zero probability for an observed level is an error") {
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(2, 2);
  ds.records = {rec("q1", "j1", "c1", 2)};
  ds.default_families();
  SufficientCounts counts = tabulate(ds, false);

  std::vector<JudgeVertices> vertices = {JudgeVertices::make(Mat::Identity(2, 2))};
  Vec pinned(2);
  pinned << 1.0, 0.0;  // observed top level has zero mixture mass
  CHECK_THROWS_AS(log_likelihood(counts.strata[0], vertices, {pinned},
                                 RandomEffects::none()),
                  Error);
}

TEST_CASE("permuting assigned labels with theta rows changes nothing") {
  std::mt19937_64 rng = make_rng(941);
  ScoreDataset ds = random_dataset(3, 3, 1, 2, 30, rng);
  SufficientCounts counts = tabulate(ds, false);
  StratumCounts s = counts.strata[0];

  std::vector<JudgeVertices> vertices = random_vertices(1, 3, 3, rng);
  std::vector<Vec> prevs = {sample_dirichlet(Vec::Ones(3), rng),
                            sample_dirichlet(Vec::Ones(3), rng)};
  double base = log_likelihood(s, vertices, prevs, RandomEffects::none());

  const int perm[3] = {2, 0, 1};
  StratumCounts ps = s;
  Mat pcols(3, 3);
  for (int l = 0; l < 3; ++l) {
    pcols.row(perm[l]) = vertices[0].columns.row(l);
    for (std::size_t j = 0; j < s.n.size(); ++j)
      for (int k = 0; k < s.n[j].rows(); ++k) ps.n[j](k, perm[l]) = s.n[j](k, l);
  }
  // Bypass the monotonicity flag; only the density matters here.
  std::vector<JudgeVertices> pv = {JudgeVertices::make(pcols)};
  double permuted = log_likelihood(ps, pv, prevs, RandomEffects::none());
  CHECK(permuted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("abstain levels flow through the likelihood like any label") {
  // Two true levels, three assigned labels; the third column row carries
  // abstain mass.
  ScoreDataset ds;
  ds.rubric = RubricSpec::make(2, 3);
  ds.records = {rec("q1", "j1", "c1", 3), rec("q2", "j1", "c1", 1)};
  ds.default_families();
  SufficientCounts counts = tabulate(ds, false);

  Mat cols(3, 2);
  cols << 0.7, 0.2,
          0.2, 0.5,
          0.1, 0.3;
  std::vector<JudgeVertices> vertices = {JudgeVertices::make(cols)};
  Vec pi(2);
  pi << 0.4, 0.6;
  double want = std::log(0.4 * 0.1 + 0.6 * 0.3) + std::log(0.4 * 0.7 + 0.6 * 0.2);
  double got = log_likelihood(counts.strata[0], vertices, {pi}, RandomEffects::none());
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}
