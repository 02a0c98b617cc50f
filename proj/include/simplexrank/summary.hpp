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

struct CandidateSummary {
  std::string candidate_id;
  double score_mean = 0.0;
  double score_lo = 0.0;
  double score_hi = 0.0;
  double rank_mean = 0.0;
  int rank_lo = 0;
  int rank_hi = 0;
  double rhat = 0.0;
  double ess = 0.0;
};

struct RankReport {
  std::string method;
  std::vector<CandidateSummary> candidates;  // best first by mean score
  Ranking ranking;                           // point ranking by mean score
  std::int64_t divergences = 0;
  std::map<std::string, double> extras;

  std::string to_tsv() const;
  std::string to_json() const;
  static RankReport from_json(const std::string& text);
};

// Turns per-chain score draws (rows are draws, columns follow candidate_ids)
// into rank and score summaries.  Ranks are competition ranks per draw; the
// intervals are central 95% with lower empirical quantiles, so rank bounds
// stay integers.  Convergence diagnostics run on the per-candidate score
// chains.
RankReport summarize_ranks(const std::vector<std::string>& candidate_ids,
                           const std::vector<Mat>& score_draws,
                           bool with_diagnostics = true);

}  // namespace simplexrank
