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

#include "simplexrank/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace simplexrank {

JudgeVertices JudgeVertices::make(const Mat& columns) {
  if (columns.rows() < columns.cols())
    fail("InvalidVertices", "need at least as many assigned as true levels");
  for (Eigen::Index m = 0; m < columns.cols(); ++m)
    check_distribution(columns.col(m), "vertex column");
  JudgeVertices v;
  v.columns = columns;
  v.monotone = true;
  for (Eigen::Index m = 0; m + 1 < columns.cols(); ++m)
    if (!(columns(0, m + 1) < columns(0, m))) v.monotone = false;
  return v;
}

BarycentricResult barycentric_coords(const Eigen::Ref<const Vec>& point,
                                     const Eigen::Ref<const Mat>& vertices,
                                     double tol) {
  const Eigen::Index rows = vertices.rows();
  const Eigen::Index cols = vertices.cols();
  if (point.size() != rows)
    fail("DimensionMismatch", "point dimension does not match vertices");

  Mat a(rows + 1, cols);
  a.topRows(rows) = vertices;
  a.bottomRows(1).setOnes();
  Vec b(rows + 1);
  b.head(rows) = point;
  b[rows] = 1.0;

  Eigen::ColPivHouseholderQR<Mat> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols)
    fail("DegenerateVertices", "vertex columns are affinely dependent");

  BarycentricResult r;
  r.coords = qr.solve(b);
  double residual = (a * r.coords - b).cwiseAbs().maxCoeff();
  r.inside = residual <= tol && (r.coords.array() >= -tol).all();
  return r;
}

Vec mixture(const Eigen::Ref<const Mat>& vertices,
            const Eigen::Ref<const Vec>& prevalence) {
  if (vertices.cols() != prevalence.size())
    fail("DimensionMismatch", "prevalence length does not match vertex count");
  check_distribution(prevalence, "prevalence");
  return vertices * prevalence;
}

double expected_score(const Eigen::Ref<const Vec>& level_values,
                      const Eigen::Ref<const Vec>& prevalence) {
  if (level_values.size() != prevalence.size())
    fail("DimensionMismatch", "level values length does not match prevalence");
  return level_values.dot(prevalence);
}

Ranking rank_binary_strong(const std::map<std::string, Vec>& marginals,
                           const RubricSpec& rubric) {
  if (rubric.true_levels != 2)
    fail("InvalidRubric", "strong-constancy shortcut requires two true levels");
  // The assigned label aligned with the top true level; abstain-style labels
  // sit above it and do not enter the ordering statistic.
  const Eigen::Index top = rubric.true_levels - 1;
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& [id, gamma] : marginals) {
    if (gamma.size() != rubric.assigned_levels)
      fail("DimensionMismatch", "marginal has wrong number of levels for " + id);
    scores.emplace_back(id, gamma[top]);
  }
  if (scores.empty()) fail("EmptyInput", "no marginals to rank");
  return make_ranking(scores);
}

namespace {

const std::string& family_or_id(const std::map<std::string, std::string>& fam,
                                const std::string& id) {
  auto it = fam.find(id);
  return it != fam.end() ? it->second : id;
}

}  // namespace

Ranking rank_binary_moderate(
    const std::map<std::string, std::map<std::string, Vec>>& marginals_by_judge,
    const std::map<std::string, std::string>& judge_family,
    const std::map<std::string, std::string>& candidate_family,
    const RubricSpec& rubric) {
  if (rubric.true_levels != 2)
    fail("InvalidRubric", "moderate-constancy ranking requires two true levels");
  const Eigen::Index top = rubric.true_levels - 1;

  std::vector<std::string> judges;
  std::set<std::string> candidate_set;
  for (const auto& [j, per_cand] : marginals_by_judge) {
    judges.push_back(j);
    for (const auto& [k, g] : per_cand) {
      (void)g;
      candidate_set.insert(k);
    }
  }
  std::vector<std::string> candidates(candidate_set.begin(), candidate_set.end());
  if (judges.size() < 2 || candidates.size() < 4)
    fail("InsufficientCore", "need at least two judges and four candidates");

  auto allowed = [&](const std::string& j, const std::string& k) {
    return family_or_id(judge_family, j) != family_or_id(candidate_family, k);
  };
  auto gamma_of = [&](const std::string& j, const std::string& k, double* out) {
    auto jit = marginals_by_judge.find(j);
    if (jit == marginals_by_judge.end()) return false;
    auto kit = jit->second.find(k);
    if (kit == jit->second.end()) return false;
    if (kit->second.size() != rubric.assigned_levels)
      fail("DimensionMismatch", "marginal has wrong number of levels for " + k);
    *out = kit->second[top];
    return true;
  };

  // Core candidates can be scored by every judge; they anchor the shared scale.
  std::vector<std::string> core;
  for (const auto& k : candidates) {
    bool ok = true;
    for (const auto& j : judges) {
      double g;
      if (!allowed(j, k) || !gamma_of(j, k, &g)) {
        ok = false;
        break;
      }
    }
    if (ok) core.push_back(k);
  }
  if (core.size() < 2)
    fail("InsufficientCore", "fewer than two candidates scoreable by all judges");

  const std::string& j1 = judges.front();
  std::string ref_lo, ref_hi;
  double best_sep = -1.0;
  for (std::size_t a = 0; a < core.size(); ++a) {
    for (std::size_t b = a + 1; b < core.size(); ++b) {
      double ga = 0.0, gb = 0.0;
      gamma_of(j1, core[a], &ga);
      gamma_of(j1, core[b], &gb);
      double sep = std::abs(ga - gb);
      if (sep > best_sep) {
        best_sep = sep;
        if (ga < gb) {
          ref_lo = core[a];
          ref_hi = core[b];
        } else {
          ref_lo = core[b];
          ref_hi = core[a];
        }
      }
    }
  }

  if (best_sep == 0.0) {
    // No usable anchors.  If every candidate is indistinguishable from the
    // anchors under every judge allowed to score it, the whole field is tied;
    // anything else is unrecoverable.
    for (const auto& k : candidates) {
      bool any_judge = false;
      for (const auto& j : judges) {
        double g = 0.0;
        if (!allowed(j, k) || !gamma_of(j, k, &g)) continue;
        any_judge = true;
        double gr = 0.0;
        gamma_of(j, core.front(), &gr);
        if (g != gr) fail("InsufficientCore", "anchors carry no separation");
      }
      if (!any_judge) fail("InsufficientCore", "no judge may score " + k);
    }
    Ranking r;
    r.order = candidates;
    r.tie_groups.push_back(candidates);
    return r;
  }

  // Place each candidate between the anchors using its first allowed judge.
  // The prevalence gap of the anchors cancels the unknown per-judge vertices,
  // so the scaled positions are judge-independent.
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& k : candidates) {
    bool placed = false;
    for (const auto& j : judges) {
      double gk, glo, ghi;
      if (!allowed(j, k)) continue;
      if (!gamma_of(j, k, &gk) || !gamma_of(j, ref_lo, &glo) || !gamma_of(j, ref_hi, &ghi))
        continue;
      if (ghi == glo) continue;
      scores.emplace_back(k, (gk - glo) / (ghi - glo));
      placed = true;
      break;
    }
    if (!placed) fail("InsufficientCore", "no usable judge for candidate " + k);
  }
  return make_ranking(scores);
}

namespace {

struct WitnessProbe {
  bool valid = false;
  Mat prevs_plus{3, 2}, prevs_minus{3, 2};
  double d_plus = 0.0, d_minus = 0.0;
};

WitnessProbe probe_step(const Mat& base, const Mat& delta, double h, const Mat& gammas,
                        const Vec& values) {
  WitnessProbe p;
  const double entry_floor = 1e-12;
  const double prev_floor = 1e-9;
  Mat plus = base + h * delta;
  Mat minus = base - h * delta;
  if ((plus.array() < entry_floor).any() || (minus.array() < entry_floor).any()) return p;

  Eigen::PartialPivLU<Mat> lu_p(plus), lu_m(minus);
  for (int k = 0; k < 2; ++k) {
    p.prevs_plus.col(k) = lu_p.solve(gammas.col(k));
    p.prevs_minus.col(k) = lu_m.solve(gammas.col(k));
  }
  if ((p.prevs_plus.array() < prev_floor).any() ||
      (p.prevs_minus.array() < prev_floor).any())
    return p;

  p.d_plus = values.dot(p.prevs_plus.col(0) - p.prevs_plus.col(1));
  p.d_minus = values.dot(p.prevs_minus.col(0) - p.prevs_minus.col(1));
  p.valid = p.d_plus * p.d_minus < 0.0 && std::abs(p.d_plus) > 1e-14 &&
            std::abs(p.d_minus) > 1e-14;
  return p;
}

}  // namespace

NonidentifiabilityWitness make_nonidentifiability_witness(
    const Eigen::Ref<const Mat>& base_vertices, double epsilon,
    const Eigen::Ref<const Vec>& level_values) {
  if (base_vertices.rows() != 3 || base_vertices.cols() != 3)
    fail("Precondition", "witness construction is specific to three levels");
  if (level_values.size() != 3) fail("Precondition", "need three level values");
  for (int m = 0; m < 3; ++m) check_distribution(base_vertices.col(m), "base column");
  if ((base_vertices.array() <= 0.0).any())
    fail("Precondition", "base vertices must be interior");
  if (!(epsilon > 0.0) || epsilon >= 1.0 / 3.0)
    fail("Precondition", "epsilon must lie in (0, 1/3)");

  Eigen::FullPivLU<Mat> lu(base_vertices);
  if (!lu.isInvertible()) fail("SingularBase", "base vertices are singular");

  NonidentifiabilityWitness w;
  w.base_vertices = base_vertices;
  w.epsilon = epsilon;
  w.direction = Vec(3);
  w.direction << 1.0, -2.0, 1.0;

  Vec center = Vec::Constant(3, 1.0 / 3.0);
  w.prevalence_pair.resize(3, 2);
  w.prevalence_pair.col(0) = center + 0.5 * epsilon * w.direction;
  w.prevalence_pair.col(1) = center - 0.5 * epsilon * w.direction;

  w.shared_marginals = base_vertices * w.prevalence_pair;

  w.dual = lu.inverse().transpose() * level_values;
  w.dual_mean = w.dual.mean();
  Vec centered = w.dual.array() - w.dual_mean;
  w.perturbation = centered * w.direction.transpose();

  // Score gap between the two candidates moves linearly in the step to first
  // order; a flat derivative means the dual degenerated, which the algebra
  // rules out for invertible interior bases.
  double deriv = epsilon * w.direction.squaredNorm() * centered.squaredNorm();
  if (deriv < 1e-12)
    fail("NoFlipFound", "score-difference derivative vanished");

  double h_cap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (w.perturbation(i, j) != 0.0)
        h_cap = std::min(h_cap, base_vertices(i, j) / std::abs(w.perturbation(i, j)));
  if (!std::isfinite(h_cap) || h_cap <= 0.0)
    fail("NoFlipFound", "no admissible step exists");
  h_cap *= 1.0 - 1e-9;

  // Scan from the largest admissible step down, then sharpen the boundary by
  // bisection so the reported step is close to maximal.
  const int grid = 10000;
  double h_found = -1.0;
  double h_fail_above = h_cap;
  WitnessProbe best;
  for (int g = 0; g < grid; ++g) {
    double h = h_cap * (1.0 - static_cast<double>(g) / grid);
    if (h <= 0.0) break;
    WitnessProbe p = probe_step(base_vertices, w.perturbation, h, w.shared_marginals,
                                level_values);
    if (p.valid) {
      h_found = h;
      best = p;
      break;
    }
    h_fail_above = h;
  }
  if (h_found < 0.0) fail("NoFlipFound", "no valid step with opposite orderings");

  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (h_found + h_fail_above);
    WitnessProbe p = probe_step(base_vertices, w.perturbation, mid, w.shared_marginals,
                                level_values);
    if (p.valid) {
      h_found = mid;
      best = p;
    } else {
      h_fail_above = mid;
    }
  }

  w.step = h_found;
  w.prevs_plus = best.prevs_plus;
  w.prevs_minus = best.prevs_minus;
  w.scores_plus = Vec(2);
  w.scores_minus = Vec(2);
  for (int k = 0; k < 2; ++k) {
    w.scores_plus[k] = level_values.dot(w.prevs_plus.col(k));
    w.scores_minus[k] = level_values.dot(w.prevs_minus.col(k));
  }
  return w;
}

bool envelope_feasible(const std::map<std::string, Vec>& marginals,
                       const Eigen::Ref<const Mat>& vertices, double tol,
                       std::vector<std::string>* violators) {
  bool ok = true;
  for (const auto& [id, gamma] : marginals) {
    BarycentricResult r = barycentric_coords(gamma, vertices, tol);
    if (!r.inside) {
      ok = false;
      if (violators) violators->push_back(id);
    }
  }
  return ok;
}

}  // namespace simplexrank
