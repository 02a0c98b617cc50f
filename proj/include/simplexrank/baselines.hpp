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
#include <map>
#include <string>
#include <vector>

#include "simplexrank/core_model.hpp"
#include "simplexrank/summary.hpp"

namespace simplexrank {

// Reference methods the model-based ranking is measured against.  All of them
// score a record by its raw assigned value (level - 1) and pool across judges
// and strata.

// Mean score per candidate with a normal-approximation score interval; the
// rank interval inverts the score interval against the other candidates'
// point means.
RankReport simple_average(const ScoreDataset& ds);

struct SingleJudgeResult {
  RankReport pooled;  // matches simple_average on the full data exactly
  std::map<std::string, RankReport> per_judge;
};

SingleJudgeResult single_judge(const ScoreDataset& ds);

// Nonparametric intervals: questions are resampled with replacement within
// their stratum, ranks recomputed per replicate, intervals read off the
// replicate percentiles.  Point estimates come from the original data.
RankReport bootstrap_rank_ci(const ScoreDataset& ds, int replicates = 1000,
                             std::uint64_t seed = 0);

// Pairwise record of every same-question same-judge candidate pair; a higher
// assigned level wins, equal levels tie.
struct PairwiseCounts {
  std::vector<std::string> ids;  // sorted
  Mat wins;                      // wins(i, j): i beat j
  Mat ties;                      // symmetric
};

PairwiseCounts pairwise_from_dataset(const ScoreDataset& ds);

struct BradleyTerryResult {
  RankReport report;
  std::vector<std::string> ids;
  Vec lambda;  // worth per id, normalized to sum to the component size
  double nu = 1.0;
  std::vector<std::vector<std::string>> components;
  int iterations = 0;
};

// Paired-comparison worth fit with a tie parameter, by minorization steps for
// the worths and a one-dimensional solve for the tie parameter.  A
// disconnected comparison graph yields per-component fits stitched into one
// report, larger components first.
BradleyTerryResult fit_rao_kupper(const PairwiseCounts& pc, int max_iters = 10000);

// Full fit plus question-resampled bootstrap rank intervals.
BradleyTerryResult bradley_terry_ties(const ScoreDataset& ds, int replicates = 200,
                                      std::uint64_t seed = 0, int max_iters = 10000);

double rao_kupper_log_likelihood(const PairwiseCounts& pc, const Vec& lambda,
                                 double nu);

}  // namespace simplexrank
