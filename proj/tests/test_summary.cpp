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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "simplexrank/common.hpp"
#include "simplexrank/summary.hpp"

using namespace simplexrank;

namespace {

// Two chains of score draws around the given per-candidate centers.
std::vector<Mat> noisy_draws(const std::vector<double>& centers, double sd,
                             int draws, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<Mat> chains;
  for (int c = 0; c < 2; ++c) {
    Mat m(draws, static_cast<int>(centers.size()));
    for (int d = 0; d < draws; ++d)
      for (std::size_t g = 0; g < centers.size(); ++g)
        m(d, static_cast<int>(g)) = centers[g] + normal(rng);
    chains.push_back(m);
  }
  return chains;
}

const CandidateSummary& find(const RankReport& rep, const std::string& id) {
  for (const CandidateSummary& c : rep.candidates)
    if (c.candidate_id == id) return c;
  REQUIRE(false);
  static CandidateSummary dummy;
  return dummy;
}

}  // namespace

TEST_CASE("a dominant candidate pins its rank interval") {
  RankReport rep =
      summarize_ranks({"low", "high"}, noisy_draws({0.2, 0.9}, 0.05, 500, 21));

  const CandidateSummary& hi = find(rep, "high");
  CHECK(hi.rank_mean == doctest::Approx(1.0));
  CHECK(hi.rank_lo == 1);
  CHECK(hi.rank_hi == 1);
  const CandidateSummary& lo = find(rep, "low");
  CHECK(lo.rank_mean == doctest::Approx(2.0));
  CHECK(lo.rank_lo == 2);
  CHECK(lo.rank_hi == 2);

  // Best mean score comes first and the point ranking agrees.
  CHECK(rep.candidates.front().candidate_id == "high");
  CHECK(rep.ranking.tie_groups.size() == 2);
  CHECK(rep.ranking.tie_groups[0] == std::vector<std::string>{"high"});

  CHECK(hi.score_mean == doctest::Approx(0.9).epsilon(0.05));
  CHECK(hi.score_lo < hi.score_mean);
  CHECK(hi.score_hi > hi.score_mean);
}

TEST_CASE("symmetric candidates split the rank draws") {
  RankReport rep =
      summarize_ranks({"a", "b"}, noisy_draws({0.5, 0.5}, 0.1, 2000, 22));

  for (const std::string& id : {"a", "b"}) {
    const CandidateSummary& c = find(rep, id);
    CHECK(std::abs(c.rank_mean - 1.5) < 0.1);
    CHECK(c.rank_lo == 1);
    CHECK(c.rank_hi == 2);
  }
}

TEST_CASE("diagnostics flow into the summaries") {
  RankReport rep =
      summarize_ranks({"a", "b"}, noisy_draws({0.3, 0.6}, 0.1, 1000, 23));
  for (const CandidateSummary& c : rep.candidates) {
    CHECK(c.rhat <= 1.01);
    CHECK(c.ess > 1000.0);
  }

  RankReport off = summarize_ranks({"a", "b"}, noisy_draws({0.3, 0.6}, 0.1, 1000, 23),
                                   false);
  for (const CandidateSummary& c : off.candidates) {
    CHECK(c.rhat == 0.0);
    CHECK(c.ess == 0.0);
  }
}

TEST_CASE("tsv lists every candidate") {
  RankReport rep =
      summarize_ranks({"apple", "pear"}, noisy_draws({0.2, 0.8}, 0.05, 200, 24));
  rep.method = "bayes";
  std::string tsv = rep.to_tsv();
  CHECK(tsv.find("apple") != std::string::npos);
  CHECK(tsv.find("pear") != std::string::npos);
  CHECK(tsv.find("candidate") != std::string::npos);
  CHECK(tsv.find("rank_mean") != std::string::npos);
}

TEST_CASE("json round trip preserves the report") {
  RankReport rep =
      summarize_ranks({"x", "y", "z"}, noisy_draws({0.1, 0.5, 0.9}, 0.2, 400, 25));
  rep.method = "bayes";
  rep.divergences = 3;
  rep.extras["spearman"] = 0.875;

  RankReport back = RankReport::from_json(rep.to_json());
  CHECK(back.method == rep.method);
  CHECK(back.divergences == rep.divergences);
  CHECK(back.extras.at("spearman") == doctest::Approx(0.875));
  REQUIRE(back.candidates.size() == rep.candidates.size());
  for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
    const CandidateSummary& a = rep.candidates[i];
    const CandidateSummary& b = back.candidates[i];
    CHECK(a.candidate_id == b.candidate_id);
    CHECK(b.score_mean == doctest::Approx(a.score_mean));
    CHECK(b.score_lo == doctest::Approx(a.score_lo));
    CHECK(b.score_hi == doctest::Approx(a.score_hi));
    CHECK(b.rank_mean == doctest::Approx(a.rank_mean));
    CHECK(b.rank_lo == a.rank_lo);
    CHECK(b.rank_hi == a.rank_hi);
  }
  CHECK(back.ranking.tie_groups == rep.ranking.tie_groups);
}

TEST_CASE("bad inputs are rejected") {
  CHECK_THROWS_AS(summarize_ranks({"a"}, {}), Error);
  Mat draws(10, 2);
  draws.setZero();
  CHECK_THROWS_AS(summarize_ranks({"a"}, {draws}), Error);
}
