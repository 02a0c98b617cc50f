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

#include <cstdint>
#include <string>
#include <vector>

#include "simplexrank/fit.hpp"

namespace simplexrank {

// One grid point of the hyperparameter sensitivity sweep. Metrics are NaN
// when unavailable (failed cell, or no truth supplied for coverage).
struct SweepCell {
  double omega = 0.0;
  double beta_max = 0.0;
  bool ok = false;
  std::string error;  // "Code: message" when the cell failed
  double spearman_vs_base = 0.0;
  double mean_rank_ci_width = 0.0;
  double mean_score_ci_width = 0.0;
  double coverage = 0.0;
  std::int64_t divergences = 0;
  RankReport report;
};

struct SweepReport {
  std::vector<double> omegas;
  std::vector<double> beta_maxes;
  // Reference fit at omega=0, beta_max=0; correlations are measured against
  // its posterior-mean ranking. Also present in `cells` when the grid
  // contains that point.
  SweepCell base;
  std::vector<SweepCell> cells;  // omega-major over (omegas x beta_maxes)

  const SweepCell* find(double omega, double beta_max) const;
  std::string to_tsv() const;
};

// Fits every (omega, beta_max) grid point and compares each posterior-mean
// ranking against the base cell. Per-cell sampler failures are recorded in
// the cell and the sweep continues. Deterministic given cfg.seed.
SweepReport sensitivity_sweep(const ScoreDataset& ds,
                              const std::vector<double>& omegas,
                              const std::vector<double>& beta_maxes,
                              const SamplerConfig& cfg,
                              const Ranking* truth = nullptr,
                              bool self_adjust = true);

// Correlation-vs-omega scatter, one series per beta_max.
std::string sweep_scatter_svg(const SweepReport& report);

}  // namespace simplexrank
