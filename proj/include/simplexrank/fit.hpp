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

#include "simplexrank/counts.hpp"
#include "simplexrank/hmc.hpp"
#include "simplexrank/posterior.hpp"
#include "simplexrank/summary.hpp"

namespace simplexrank {

// Posterior draws for one stratum together with the per-draw derived
// quantities the reports are built from.
struct StratumDraws {
  std::string stratum;
  std::vector<std::string> candidate_ids;
  double weight = 0.0;  // question count, used when pooling strata
  SampleResult sample;  // unconstrained states plus per-chain bookkeeping
  std::vector<Mat> scores;  // per chain: draws x K expected scores
  std::vector<Mat> ranks;   // per chain: draws x K competition ranks
  Mat mean_prevalences;     // K x M posterior means
};

// Draws across all strata. Each stratum is fit independently; pooled scores
// average the per-stratum draws aligned by (chain, iteration) weighted by
// stratum question counts, so pooled posterior mean scores equal the
// question-weighted average of the per-stratum posterior means. A candidate
// absent from a stratum is averaged over the strata that contain it.
struct PosteriorDraws {
  std::vector<StratumDraws> strata;
  std::vector<std::string> candidate_ids;  // union across strata, sorted
  std::vector<Mat> pooled_scores;          // per chain: draws x K
  std::int64_t divergences = 0;
};

// Samples the posterior for every stratum in `counts`. Deterministic given
// cfg.seed; stratum sub-seeds are derived from it.
PosteriorDraws run_sampler(const SufficientCounts& counts,
                           const Hyperparameters& hyper,
                           const SamplerConfig& cfg,
                           const ModelOptions& opts = {});

// Rank report over the pooled per-draw scores. Diagnostics cover each
// candidate's score; the divergence total is carried into the report.
RankReport summarize_ranks(const PosteriorDraws& draws);

struct FitResult {
  PosteriorDraws draws;
  RankReport report;
};

// tabulate + run_sampler + summarize_ranks in one call.
FitResult fit_bayes(const ScoreDataset& ds, const Hyperparameters& hyper,
                    const SamplerConfig& cfg, const ModelOptions& opts = {});

}  // namespace simplexrank
