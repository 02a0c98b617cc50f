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

#include "simplexrank/prior.hpp"

#include <cmath>

namespace simplexrank {

double digamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x, inv2 = inv * inv;
  r += std::log(x) - 0.5 * inv -
       inv2 * (1.0 / 12.0 -
               inv2 * (1.0 / 120.0 -
                       inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return r;
}

Vec node_concentration(int size, int offset, int boosted, double rho, double beta_max) {
  Vec c = Vec::Ones(size);
  int rel = boosted - offset;
  if (rel >= 0 && rel < size) c[rel] += rho * beta_max;
  return c;
}

Mat assemble_vertices(const JudgeTransitionParams& p, int true_levels,
                      int assigned_levels) {
  const int mp = assigned_levels;
  Mat theta(mp, true_levels);
  theta.col(0) = p.root;
  for (int t = 0; t + 1 < true_levels; ++t) {
    Vec next = Vec::Zero(mp);
    for (int l = 0; l < mp; ++l) {
      double mass = theta(l, t);
      if (l == mp - 1) {
        next[mp - 1] += mass;  // top label has nowhere higher to go
      } else {
        const Vec& w = p.nodes[t][l];
        for (int lp = l; lp < mp; ++lp) next[lp] += mass * w[lp - l];
      }
    }
    theta.col(t + 1) = next;
  }
  return theta;
}

namespace {

// Keeps the self-edge of the lowest label strictly below one so the lowest
// label's mass decreases strictly across columns (up to a 1e-12 gap).
void enforce_strict_decay(Vec& w) {
  const double cap = 1.0 - 1e-12;
  if (w[0] <= cap) return;
  double excess = w[0] - cap;
  w[0] = cap;
  double spread = excess / static_cast<double>(w.size() - 1);
  for (Eigen::Index i = 1; i < w.size(); ++i) w[i] += spread;
}

}  // namespace

JudgeTransitionParams sample_judge_transition_given_rho(double rho,
                                                        const RubricSpec& rubric,
                                                        const Hyperparameters& hyper,
                                                        std::mt19937_64& rng) {
  const int m = rubric.true_levels, mp = rubric.assigned_levels;
  JudgeTransitionParams p;
  p.rho = rho;
  p.root = sample_dirichlet(node_concentration(mp, 0, 0, rho, hyper.beta_max), rng);
  p.nodes.resize(m - 1);
  for (int t = 0; t + 1 < m; ++t) {
    p.nodes[t].resize(mp - 1);
    for (int l = 0; l + 1 < mp; ++l) {
      Vec conc = node_concentration(mp - l, l, t + 1, rho, hyper.beta_max);
      p.nodes[t][l] = sample_dirichlet(conc, rng);
      if (l == 0) enforce_strict_decay(p.nodes[t][l]);
    }
  }
  return p;
}

JudgeTransitionParams sample_judge_transition(const RubricSpec& rubric,
                                              const Hyperparameters& hyper,
                                              std::mt19937_64& rng) {
  double rho = sample_beta(1.0, 1.0, rng);
  return sample_judge_transition_given_rho(rho, rubric, hyper, rng);
}

JudgePriorParams sample_judge_vertices(const RubricSpec& rubric,
                                       const Hyperparameters& hyper, int num_judges,
                                       std::mt19937_64& rng) {
  JudgePriorParams out;
  out.judges.reserve(num_judges);
  for (int j = 0; j < num_judges; ++j)
    out.judges.push_back(sample_judge_transition(rubric, hyper, rng));
  return out;
}

RandomEffects sample_random_effects(const Hyperparameters& hyper, int num_candidates,
                                    int num_judges, std::mt19937_64& rng) {
  RandomEffects re;
  if (hyper.omega <= 0.0) return re;  // weight pinned to zero, no parameters
  re.z.reserve(num_candidates);
  re.w.resize(num_candidates);
  re.r.resize(num_judges);
  for (int k = 0; k < num_candidates; ++k) {
    re.z.push_back(sample_dirichlet(hyper.delta, rng));
    re.w[k] = sample_beta(hyper.omega * num_candidates, num_candidates, rng);
  }
  for (int j = 0; j < num_judges; ++j)
    re.r[j] = sample_beta(hyper.omega * num_judges, num_judges, rng);
  return re;
}

Vec perturb_prevalence(const Eigen::Ref<const Vec>& pi, const RandomEffects& re, int j,
                       int k) {
  if (!re.active()) return pi;
  double weight = re.w[k] * re.r[j];
  return (1.0 - weight) * pi + weight * re.z[k];
}

double dirichlet_term(const Eigen::Ref<const Vec>& x, int boosted_rel, double rho,
                      double beta_max, Vec* gx, double* grho) {
  const Eigen::Index n = x.size();
  double boost = rho * beta_max;
  double csum = static_cast<double>(n) + (boosted_rel >= 0 ? boost : 0.0);
  double lp = std::lgamma(csum);
  if (boosted_rel >= 0) lp -= std::lgamma(1.0 + boost);
  // remaining components have concentration 1: lgamma(1) = 0
  if (boosted_rel >= 0) lp += boost * std::log(x[boosted_rel]);
  if (gx && boosted_rel >= 0) (*gx)[boosted_rel] += boost / x[boosted_rel];
  if (grho && boosted_rel >= 0)
    *grho += beta_max * (digamma(csum) - digamma(1.0 + boost) + std::log(x[boosted_rel]));
  return lp;
}

double log_prior(const JudgePriorParams& params, const RandomEffects& re,
                 const std::vector<Vec>& prevalences, const RubricSpec& rubric,
                 const Hyperparameters& hyper) {
  const int m = rubric.true_levels, mp = rubric.assigned_levels;
  const int num_judges = static_cast<int>(params.judges.size());
  const int num_candidates = static_cast<int>(prevalences.size());
  double lp = 0.0;

  for (const auto& judge : params.judges) {
    // rho ~ Beta(1,1) contributes zero.
    lp += dirichlet_term(judge.root, 0, judge.rho, hyper.beta_max, nullptr, nullptr);
    for (int t = 0; t + 1 < m; ++t) {
      for (int l = 0; l + 1 < mp; ++l) {
        int rel = (t + 1 >= l) ? t + 1 - l : -1;
        lp += dirichlet_term(judge.nodes[t][l], rel, judge.rho, hyper.beta_max, nullptr,
                             nullptr);
      }
    }
  }

  // Uniform Dirichlet over each prevalence: constant log Gamma(M) apiece.
  lp += static_cast<double>(num_candidates) * std::lgamma(static_cast<double>(m));
  for (const auto& pi : prevalences) check_distribution(pi, "prevalence");

  if (re.active()) {
    if (hyper.omega <= 0.0)
      fail("NonFinite", "random effects present but omega is zero");
    double aw = hyper.omega * num_candidates, bw = num_candidates;
    double ar = hyper.omega * num_judges, br = num_judges;
    for (int k = 0; k < num_candidates; ++k) {
      lp += dirichlet_log_pdf(re.z[k], hyper.delta);
      lp += beta_log_pdf(re.w[k], aw, bw);
    }
    for (int j = 0; j < num_judges; ++j) lp += beta_log_pdf(re.r[j], ar, br);
  }

  if (!std::isfinite(lp)) fail("NonFinite", "log prior not finite");
  return lp;
}

}  // namespace simplexrank
