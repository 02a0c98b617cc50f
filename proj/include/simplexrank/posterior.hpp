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

#include <optional>
#include <random>
#include <vector>

#include "simplexrank/counts.hpp"
#include "simplexrank/geometry.hpp"
#include "simplexrank/prior.hpp"

namespace simplexrank {

// Full latent state for one stratum: per-candidate base prevalences, the
// judge transition parameters (empty when vertices are externally fixed), and
// the judge-candidate perturbation block (inactive when omega == 0).
struct ModelState {
  std::vector<Vec> prevalences;
  JudgePriorParams judge_params;
  RandomEffects re;
};

struct ModelOptions {
  // Pins the vertices instead of inferring them; used for calibration checks
  // against closed-form posteriors.
  std::optional<std::vector<JudgeVertices>> fixed_vertices;
};

// Joint density over the latent state given one stratum's count tensor.
// Works in an unconstrained coordinate system (stick-breaking for simplices,
// logit for unit scalars); logp_grad returns the log density of the
// pushforward, i.e. including the transform's log Jacobian.
class PosteriorModel {
 public:
  PosteriorModel(StratumCounts counts, RubricSpec rubric, Hyperparameters hyper,
                 ModelOptions opts = {});

  int dim() const { return dim_; }
  int num_candidates() const { return static_cast<int>(counts_.candidate_ids.size()); }
  int num_judges() const { return static_cast<int>(counts_.judge_ids.size()); }
  bool vertices_fixed() const { return opts_.fixed_vertices.has_value(); }
  bool has_random_effects() const { return hyper_.omega > 0.0; }
  const StratumCounts& counts() const { return counts_; }
  const RubricSpec& rubric() const { return rubric_; }
  const Hyperparameters& hyper() const { return hyper_; }

  Vec pack(const ModelState& state) const;
  ModelState unpack(const Vec& y, double* log_jacobian = nullptr) const;

  // Log density (prior + likelihood + Jacobian) and its gradient in the
  // unconstrained coordinates.  grad may be null.
  double logp_grad(const Vec& y, Vec* grad) const;

  ModelState sample_prior_state(std::mt19937_64& rng) const;
  std::vector<JudgeVertices> vertices_of(const ModelState& state) const;

  // Expected rubric value per candidate under the base prevalences.
  Vec scores(const ModelState& state) const;

 private:
  StratumCounts counts_;
  RubricSpec rubric_;
  Hyperparameters hyper_;
  ModelOptions opts_;
  int dim_ = 0;
  int judge_block_dim_ = 0;  // per judge
};

// Observed-data log likelihood for one stratum: every (judge, candidate)
// cell mixes the judge's vertex columns with that cell's perturbed
// prevalence.  Vertices and prevalences follow the stratum's sorted id
// order.  re may be inactive.
double log_likelihood(const StratumCounts& counts,
                      const std::vector<JudgeVertices>& vertices,
                      const std::vector<Vec>& prevalences,
                      const RandomEffects& re);

// Gradient-ascent MAP search in the unconstrained coordinates (Adam with a
// few random restarts).  Returns the best state found.
ModelState find_map(const PosteriorModel& model, std::mt19937_64& rng,
                    int iters = 2000, int restarts = 3);

}  // namespace simplexrank
