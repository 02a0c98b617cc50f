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
#include <map>
#include <random>
#include <string>

#include "simplexrank/common.hpp"
#include "simplexrank/core_model.hpp"
#include "simplexrank/geometry.hpp"

using namespace simplexrank;

namespace {

Mat identity_vertices(int n) { return Mat::Identity(n, n); }

Mat diag_biased_vertices(int n, std::mt19937_64& rng, double boost = 4.0) {
  Mat v(n, n);
  for (int m = 0; m < n; ++m) {
    Vec conc = Vec::Ones(n);
    conc[m] += boost;
    v.col(m) = sample_dirichlet(conc, rng);
  }
  return v;
}

double triangle_area(const Vec& a, const Vec& b, const Vec& c) {
  Eigen::Vector3d u = b - a, v = c - a;
  return 0.5 * u.cross(v).norm();
}

Vec vec2(double lo, double hi) {
  Vec g(2);
  g << lo, hi;
  return g;
}

}  // namespace

TEST_CASE("vertices flag monotone lowest-level mass") {
  Mat cols(2, 2);
  cols << 0.8, 0.1, 0.2, 0.9;
  JudgeVertices v = JudgeVertices::make(cols);
  CHECK(v.monotone);

  Mat flat(2, 2);
  flat << 0.5, 0.5, 0.5, 0.5;
  CHECK_FALSE(JudgeVertices::make(flat).monotone);

  Mat bad(2, 2);
  bad << 0.8, 0.1, 0.3, 0.9;  // second column does not sum to 1
  CHECK_THROWS_AS(JudgeVertices::make(bad), Error);
}

TEST_CASE("barycentric coordinates at a vertex and the centroid") {
  std::mt19937_64 rng = make_rng(101);
  Mat v = diag_biased_vertices(3, rng);
  for (int m = 0; m < 3; ++m) {
    BarycentricResult r = barycentric_coords(v.col(m), v);
    CHECK(r.inside);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(r.coords[i] - (i == m ? 1.0 : 0.0)) < 1e-9);
  }
  Vec centroid = v.rowwise().mean();
  BarycentricResult r = barycentric_coords(centroid, v);
  for (int i = 0; i < 3; ++i) CHECK(r.coords[i] == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("area ratios agree with the linear solve") {
  std::mt19937_64 rng = make_rng(211);
  for (int trial = 0; trial < 200; ++trial) {
    Mat v = diag_biased_vertices(3, rng);
    Vec pi = sample_dirichlet(Vec::Ones(3), rng);
    Vec gamma = mixture(v, pi);
    BarycentricResult r = barycentric_coords(gamma, v);
    REQUIRE(r.inside);

    double total = triangle_area(v.col(0), v.col(1), v.col(2));
    REQUIRE(total > 1e-12);
    Vec by_area(3);
    by_area[0] = triangle_area(gamma, v.col(1), v.col(2)) / total;
    by_area[1] = triangle_area(v.col(0), gamma, v.col(2)) / total;
    by_area[2] = triangle_area(v.col(0), v.col(1), gamma) / total;
    CHECK((by_area - r.coords).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mixture round trip on random full-rank vertices") {
  std::mt19937_64 rng = make_rng(307);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 100; ++trial) {
      Mat v = diag_biased_vertices(n, rng);
      Vec pi = sample_dirichlet(Vec::Ones(n), rng);
      Vec gamma = mixture(v, pi);
      CHECK(is_distribution(gamma));
      BarycentricResult r = barycentric_coords(gamma, v);
      CHECK((r.coords - pi).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("mixture basics") {
  std::mt19937_64 rng = make_rng(401);
  Mat v = diag_biased_vertices(3, rng);
  for (int m = 0; m < 3; ++m) {
    Vec e = Vec::Zero(3);
    e[m] = 1.0;
    CHECK((mixture(v, e) - v.col(m)).cwiseAbs().maxCoeff() < 1e-14);
  }
  Vec pi = sample_dirichlet(Vec::Ones(3), rng);
  CHECK((mixture(identity_vertices(3), pi) - pi).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(mixture(v, Vec::Ones(2) / 2.0), Error);
}

TEST_CASE("tall vertex matrices solve exactly for enveloped points") {
  // Three assigned levels, two true levels: the abstain row rides along.
  std::mt19937_64 rng = make_rng(419);
  Mat v(3, 2);
  v.col(0) = sample_dirichlet(Vec::Ones(3), rng);
  v.col(1) = sample_dirichlet(Vec::Ones(3), rng);
  Vec pi = vec2(0.3, 0.7);
  Vec gamma = mixture(v, pi);
  BarycentricResult r = barycentric_coords(gamma, v);
  CHECK(r.inside);
  CHECK((r.coords - pi).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("degenerate vertices are rejected, outside points flagged") {
  Mat v(3, 3);
  Vec col(3);
  col << 0.5, 0.3, 0.2;
  v.col(0) = col;
  v.col(1) = col;
  v.col(2) = Vec::Ones(3) / 3.0;
  CHECK_THROWS_WITH_AS(barycentric_coords(Vec::Ones(3) / 3.0, v),
                       doctest::Contains("affinely dependent"), Error);

  std::mt19937_64 rng = make_rng(431);
  Mat good = diag_biased_vertices(3, rng, 8.0);
  Vec corner = Vec::Zero(3);
  corner[0] = 1.0;
  BarycentricResult r = barycentric_coords(corner, good);
  CHECK_FALSE(r.inside);
  CHECK(r.coords.minCoeff() < -hull_tolerance);
}

TEST_CASE("expected score arithmetic") {
  Vec values(3);
  values << 0.0, 1.0, 2.0;
  Vec e0 = Vec::Zero(3);
  e0[0] = 1.0;
  CHECK(expected_score(values, e0) == doctest::Approx(0.0));
  CHECK(expected_score(values, Vec::Ones(3) / 3.0) == doctest::Approx(1.0));
  Vec pi(3);
  pi << 0.2, 0.3, 0.5;
  CHECK(expected_score(values, pi) == doctest::Approx(1.3));
}

TEST_CASE("strong binary ranking orders by top-level marginal") {
  RubricSpec rubric = RubricSpec::make(2, 2);
  std::map<std::string, Vec> marginals = {
      {"B", vec2(0.5, 0.5)}, {"A", vec2(0.1, 0.9)}, {"C", vec2(0.9, 0.1)}};
  Ranking r = rank_binary_strong(marginals, rubric);
  REQUIRE(r.order.size() == 3);
  CHECK(r.order[0] == "A");
  CHECK(r.order[1] == "B");
  CHECK(r.order[2] == "C");
  CHECK(r.tie_groups.size() == 3);
}

TEST_CASE("strong binary ranking groups exact ties") {
  RubricSpec rubric = RubricSpec::make(2, 2);
  std::map<std::string, Vec> marginals = {
      {"A", vec2(0.4, 0.6)}, {"B", vec2(0.4, 0.6)}, {"C", vec2(0.4, 0.6)}};
  Ranking r = rank_binary_strong(marginals, rubric);
  REQUIRE(r.tie_groups.size() == 1);
  CHECK(r.tie_groups[0].size() == 3);
}

TEST_CASE("strong binary ranking tracks prevalence under a shared judge") {
  // gamma = theta0 + pi (theta1 - theta0) with theta1 = 0.9, theta0 = 0.2.
  RubricSpec rubric = RubricSpec::make(2, 2);
  std::map<std::string, Vec> marginals;
  std::map<std::string, double> pis = {{"x", 0.8}, {"y", 0.5}, {"z", 0.2}};
  for (const auto& [id, pi] : pis) {
    double gamma = 0.2 + 0.7 * pi;
    marginals[id] = vec2(1.0 - gamma, gamma);
  }
  Ranking r = rank_binary_strong(marginals, rubric);
  CHECK(r.order[0] == "x");
  CHECK(r.order[1] == "y");
  CHECK(r.order[2] == "z");
}

TEST_CASE("strong binary ranking matches prevalence order across a grid") {
  RubricSpec rubric = RubricSpec::make(2, 2);
  for (double theta0 = 0.05; theta0 < 0.9; theta0 += 0.17) {
    for (double theta1 = theta0 + 0.05; theta1 <= 0.95; theta1 += 0.13) {
      std::map<std::string, Vec> marginals;
      std::vector<std::pair<std::string, double>> truth;
      int idx = 0;
      for (double pi : {0.15, 0.4, 0.65, 0.9}) {
        std::string id = "c" + std::to_string(idx++);
        double gamma = theta0 + pi * (theta1 - theta0);
        marginals[id] = vec2(1.0 - gamma, gamma);
        truth.emplace_back(id, pi);
      }
      Ranking got = rank_binary_strong(marginals, rubric);
      Ranking want = make_ranking(truth);
      CHECK(got.order == want.order);
    }
  }
}

TEST_CASE("strong binary ranking keeps abstain mass out of the ordering") {
  // Third assigned level (abstain) varies; only the aligned top level counts.
  RubricSpec rubric = RubricSpec::make(2, 3);
  Vec a(3), b(3);
  a << 0.1, 0.6, 0.3;
  b << 0.4, 0.5, 0.1;
  std::map<std::string, Vec> marginals = {{"a", a}, {"b", b}};
  Ranking r = rank_binary_strong(marginals, rubric);
  CHECK(r.order[0] == "a");
}

TEST_CASE("moderate ranking recovers the order through anchors") {
  RubricSpec rubric = RubricSpec::make(2, 2);
  std::map<std::string, double> pis = {
      {"c1", 0.7}, {"c2", 0.2}, {"c3", 0.4}, {"c4", 0.6}};
  // Two judges with distinct response lines; each judge family owns one
  // candidate it may not score.
  std::map<std::string, std::pair<double, double>> lines = {
      {"j1", {0.15, 0.85}}, {"j2", {0.3, 0.95}}};
  std::map<std::string, std::string> judge_family = {{"j1", "f1"}, {"j2", "f2"}};
  std::map<std::string, std::string> candidate_family = {
      {"c1", "f1"}, {"c2", "f2"}, {"c3", "f3"}, {"c4", "f4"}};

  std::map<std::string, std::map<std::string, Vec>> marginals;
  for (const auto& [j, line] : lines) {
    for (const auto& [k, pi] : pis) {
      if (judge_family[j] == candidate_family[k]) continue;
      double gamma = line.first + pi * (line.second - line.first);
      marginals[j][k] = vec2(1.0 - gamma, gamma);
    }
  }
  Ranking r = rank_binary_moderate(marginals, judge_family, candidate_family, rubric);
  REQUIRE(r.order.size() == 4);
  CHECK(r.order[0] == "c1");
  CHECK(r.order[1] == "c4");
  CHECK(r.order[2] == "c3");
  CHECK(r.order[3] == "c2");

  // The anchor ratio cancels the judge line exactly.
  double g2 = marginals["j1"]["c2"][1];
  double g3 = marginals["j1"]["c3"][1];
  double g4 = marginals["j1"]["c4"][1];
  double lhs = (g2 - g3) / (g4 - g3);
  double rhs = (0.2 - 0.4) / (0.6 - 0.4);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("moderate ranking ties the whole field when prevalences agree") {
  RubricSpec rubric = RubricSpec::make(2, 2);
  std::map<std::string, std::string> none;
  std::map<std::string, std::map<std::string, Vec>> marginals;
  for (const std::string& j : {"j1", "j2"}) {
    for (const std::string& k : {"c1", "c2", "c3", "c4"}) {
      marginals[j][k] = vec2(0.45, 0.55);
    }
  }
  Ranking r = rank_binary_moderate(marginals, none, none, rubric);
  REQUIRE(r.tie_groups.size() == 1);
  CHECK(r.tie_groups[0].size() == 4);
}

TEST_CASE("moderate ranking requires two judges and four candidates") {
  RubricSpec rubric = RubricSpec::make(2, 2);
  std::map<std::string, std::string> none;
  std::map<std::string, std::map<std::string, Vec>> marginals;
  marginals["j1"]["c1"] = vec2(0.5, 0.5);
  marginals["j1"]["c2"] = vec2(0.4, 0.6);
  CHECK_THROWS_AS(rank_binary_moderate(marginals, none, none, rubric), Error);
}

TEST_CASE("witness flips the score ordering while marginals stay put") {
  Mat base(3, 3);
  base << 0.8, 0.1, 0.1,
          0.1, 0.8, 0.1,
          0.1, 0.1, 0.8;
  Vec values(3);
  values << 0.0, 1.0, 2.0;
  NonidentifiabilityWitness w = make_nonidentifiability_witness(base, 0.05, values);

  CHECK(w.step > 0.0);
  CHECK(w.epsilon == doctest::Approx(0.05));

  // Perturbation columns sum to zero, so both configurations keep column sums.
  for (int c = 0; c < 3; ++c)
    CHECK(std::abs(w.perturbation.col(c).sum()) < 1e-12);

  // Direction carries zero expected-score weight: equal scores at h = 0.
  CHECK(std::abs(w.direction.dot(values)) < 1e-12);
  double s1 = expected_score(values, w.prevalence_pair.col(0));
  double s2 = expected_score(values, w.prevalence_pair.col(1));
  CHECK(std::abs(s1 - s2) < 1e-12);

  Mat plus = w.base_vertices + w.step * w.perturbation;
  Mat minus = w.base_vertices - w.step * w.perturbation;
  for (int k = 0; k < 2; ++k) {
    CHECK(is_distribution(w.prevs_plus.col(k)));
    CHECK(is_distribution(w.prevs_minus.col(k)));
    CHECK(is_distribution(plus.col(k)));
    CHECK(is_distribution(minus.col(k)));
    // Both configurations reproduce the same observable marginals.
    CHECK(((plus * w.prevs_plus.col(k)) - w.shared_marginals.col(k))
              .cwiseAbs().maxCoeff() < 1e-10);
    CHECK(((minus * w.prevs_minus.col(k)) - w.shared_marginals.col(k))
              .cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(is_distribution(plus.col(2)));
  CHECK(is_distribution(minus.col(2)));

  double diff_plus = w.scores_plus[0] - w.scores_plus[1];
  double diff_minus = w.scores_minus[0] - w.scores_minus[1];
  CHECK(diff_plus * diff_minus < 0.0);
}

TEST_CASE("witness generalizes across random interior bases") {
  std::mt19937_64 rng = make_rng(509);
  Vec values(3);
  values << 0.0, 1.0, 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    Mat base = diag_biased_vertices(3, rng, 5.0);
    NonidentifiabilityWitness w = make_nonidentifiability_witness(base, 0.04, values);
    Mat plus = w.base_vertices + w.step * w.perturbation;
    Mat minus = w.base_vertices - w.step * w.perturbation;
    for (int k = 0; k < 2; ++k) {
      CHECK(((plus * w.prevs_plus.col(k)) - w.shared_marginals.col(k))
                .cwiseAbs().maxCoeff() < 1e-10);
      CHECK(((minus * w.prevs_minus.col(k)) - w.shared_marginals.col(k))
                .cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK((w.scores_plus[0] - w.scores_plus[1]) *
              (w.scores_minus[0] - w.scores_minus[1]) < 0.0);
  }
}

TEST_CASE("witness rejects prevalences pushed off the simplex") {
  Mat base(3, 3);
  base << 0.8, 0.1, 0.1,
          0.1, 0.8, 0.1,
          0.1, 0.1, 0.8;
  Vec values(3);
  values << 0.0, 1.0, 2.0;
  // epsilon so large that centroid +/- epsilon a / 2 leaves the simplex.
  CHECK_THROWS_AS(make_nonidentifiability_witness(base, 0.5, values), Error);
}

TEST_CASE("envelope feasibility") {
  std::mt19937_64 rng = make_rng(601);
  Mat corners = identity_vertices(3);
  std::map<std::string, Vec> gammas;
  for (int i = 0; i < 5; ++i)
    gammas["g" + std::to_string(i)] = sample_dirichlet(Vec::Ones(3), rng);
  CHECK(envelope_feasible(gammas, corners));

  Mat interior = diag_biased_vertices(3, rng, 6.0);
  std::map<std::string, Vec> at_vertex = {{"v", interior.col(1)}};
  CHECK(envelope_feasible(at_vertex, interior));

  Vec corner = Vec::Zero(3);
  corner[2] = 1.0;
  std::map<std::string, Vec> outside = {{"far", corner}, {"in", interior.col(0)}};
  std::vector<std::string> violators;
  CHECK_FALSE(envelope_feasible(outside, interior, hull_tolerance, &violators));
  REQUIRE(violators.size() == 1);
  CHECK(violators[0] == "far");
}
