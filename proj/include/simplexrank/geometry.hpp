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

#pragma once

#include <map>
#include <string>
#include <vector>

#include "simplexrank/core_model.hpp"

namespace simplexrank {

// Geometry of judged scores.  A judge is a point configuration on the simplex
// of assigned-score distributions: column m is the distribution of assigned
// labels given a candidate whose true level is m.  A candidate's observable
// marginal is the convex mixture of those columns weighted by its prevalence
// vector, so prevalences are barycentric coordinates of the marginal in the
// judge's vertex configuration.

inline constexpr double hull_tolerance = 1e-9;

// Columns of a judge's confusion structure: assigned_levels x true_levels.
// `monotone` records whether the probability of the lowest assigned label
// strictly decreases as the true level rises; rankings that shortcut the full
// model rely on it.
struct JudgeVertices {
  Mat columns;
  bool monotone = false;

  static JudgeVertices make(const Mat& columns);
};

struct BarycentricResult {
  Vec coords;   // may carry small negatives when the point lies outside
  bool inside;  // all coordinates >= -hull_tolerance and point on the vertex span
};

// Solves vertices * x = point with the affine constraint sum(x) = 1 appended.
// Works for tall vertex matrices (more assigned than true levels) as an exact
// least-squares solve; throws DegenerateVertices on affinely dependent columns.
BarycentricResult barycentric_coords(const Eigen::Ref<const Vec>& point,
                                     const Eigen::Ref<const Mat>& vertices,
                                     double tol = hull_tolerance);

// Marginal assigned-score distribution of a candidate: vertices * prevalence.
Vec mixture(const Eigen::Ref<const Mat>& vertices,
            const Eigen::Ref<const Vec>& prevalence);

double expected_score(const Eigen::Ref<const Vec>& level_values,
                      const Eigen::Ref<const Vec>& prevalence);

// Two-level shortcut under a single monotone judge with candidate-independent
// vertices: ranking by the probability of the assigned label aligned with the
// top true level reproduces the prevalence ordering.
Ranking rank_binary_strong(const std::map<std::string, Vec>& marginals,
                           const RubricSpec& rubric);

// Two-level ranking when vertices are only constant within each judge and
// judges may not score their own family.  Candidates are placed on a common
// scale through two reference candidates scoreable by every judge; each
// remaining candidate is located via any judge allowed to score it.
Ranking rank_binary_moderate(
    const std::map<std::string, std::map<std::string, Vec>>& marginals_by_judge,
    const std::map<std::string, std::string>& judge_family,
    const std::map<std::string, std::string>& candidate_family,
    const RubricSpec& rubric);

// A certificate that three-level expected scores are not identified by
// marginals alone: two vertex configurations base +/- step * perturbation that
// reproduce the same candidate marginals with valid prevalences yet order the
// two candidates' expected scores oppositely.
struct NonidentifiabilityWitness {
  Mat base_vertices;     // 3x3
  Mat perturbation;      // columns sum to zero
  double step = 0.0;     // h > 0
  double epsilon = 0.0;  // prevalence separation used in the construction
  Vec direction;         // (1, -2, 1)
  Vec dual;              // inverse-transpose image of the level values
  double dual_mean = 0.0;
  Mat prevalence_pair;    // 3x2, the two constructed prevalences
  Mat shared_marginals;   // 3x2, identical under both configurations
  Mat prevs_plus;         // induced prevalences under base + h * perturbation
  Mat prevs_minus;        // induced prevalences under base - h * perturbation
  Vec scores_plus;        // expected scores of the two candidates (+ config)
  Vec scores_minus;       // expected scores of the two candidates (- config)
};

NonidentifiabilityWitness make_nonidentifiability_witness(
    const Eigen::Ref<const Mat>& base_vertices, double epsilon,
    const Eigen::Ref<const Vec>& level_values);

// True when every marginal admits barycentric coordinates >= -tol in the given
// vertex configuration (and lies on its span).  Optionally reports violators.
bool envelope_feasible(const std::map<std::string, Vec>& marginals,
                       const Eigen::Ref<const Mat>& vertices,
                       double tol = hull_tolerance,
                       std::vector<std::string>* violators = nullptr);

}  // namespace simplexrank
