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

#include <vector>

#include "simplexrank/core_model.hpp"
#include "simplexrank/geometry.hpp"

namespace simplexrank {

// Prior over judge vertices, built as a layered flow on assigned labels.
//
// Column 0 (lowest true level) is a Dirichlet draw whose concentration boosts
// the lowest label.  Each later column is produced by pushing the previous
// column's mass through per-label transition nodes: the node at label l
// spreads its mass over labels l..M'-1 (mass never moves to a lower label),
// with a Dirichlet whose concentration boosts the label matching the new true
// level.  The top label's node has a single outgoing edge and carries no
// parameter.  Upward-only flow makes the probability of the lowest label
// strictly decreasing across columns, which is the monotonicity the ranking
// shortcuts rely on.

struct JudgeTransitionParams {
  double rho = 0.5;  // per-judge quality weight on the concentration boost
  Vec root;          // column 0, length M'
  // nodes[t][l]: weights over target labels l..M'-1 for the transition from
  // column t to column t+1; l runs over 0..M'-2.
  std::vector<std::vector<Vec>> nodes;
};

struct JudgePriorParams {
  std::vector<JudgeTransitionParams> judges;
};

// Shared-direction relaxation of prevalence constancy.  A judge j's view of
// candidate k is pulled toward direction z[k] with weight w[k] * r[j].
// Inactive (empty) effects leave prevalences untouched.
struct RandomEffects {
  std::vector<Vec> z;  // per candidate, length M
  Vec w;               // per candidate, in [0,1]
  Vec r;               // per judge, in [0,1]

  bool active() const { return w.size() > 0; }
  static RandomEffects none() { return {}; }
};

// Concentration for the root draw and for a transition node; `boosted` is the
// absolute label index receiving 1 + rho * beta_max (target true level).
Vec node_concentration(int size, int offset, int boosted, double rho, double beta_max);

Mat assemble_vertices(const JudgeTransitionParams& p, int true_levels,
                      int assigned_levels);

JudgeTransitionParams sample_judge_transition_given_rho(double rho,
                                                        const RubricSpec& rubric,
                                                        const Hyperparameters& hyper,
                                                        std::mt19937_64& rng);

JudgeTransitionParams sample_judge_transition(const RubricSpec& rubric,
                                              const Hyperparameters& hyper,
                                              std::mt19937_64& rng);

JudgePriorParams sample_judge_vertices(const RubricSpec& rubric,
                                       const Hyperparameters& hyper, int num_judges,
                                       std::mt19937_64& rng);

RandomEffects sample_random_effects(const Hyperparameters& hyper, int num_candidates,
                                    int num_judges, std::mt19937_64& rng);

Vec perturb_prevalence(const Eigen::Ref<const Vec>& pi, const RandomEffects& re, int j,
                       int k);

// Joint log prior density of all constrained parameters.  The random-effect
// terms only appear when omega > 0; omega = 0 pins the perturbation weight to
// zero and the block carries no parameters at all.
double log_prior(const JudgePriorParams& params, const RandomEffects& re,
                 const std::vector<Vec>& prevalences, const RubricSpec& rubric,
                 const Hyperparameters& hyper);

// Per-factor helper shared with the gradient assembly: log Dirichlet density
// whose concentration may depend on rho through one boosted component.
// Accumulates d/dx into *gx and d/drho into *grho when non-null.
double dirichlet_term(const Eigen::Ref<const Vec>& x, int boosted_rel, double rho,
                      double beta_max, Vec* gx, double* grho);

double digamma(double x);

}  // namespace simplexrank
