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

struct StratumCounts {
  std::string stratum;
  std::vector<std::string> judge_ids;      // sorted
  std::vector<std::string> candidate_ids;  // sorted
  std::vector<CountMat> n;                 // per judge: candidates x assigned levels
  std::int64_t total = 0;
  std::int64_t question_count = 0;  // distinct questions, used as pooling weight

  int judge_index(const std::string& id) const;
  int candidate_index(const std::string& id) const;
};

struct SufficientCounts {
  RubricSpec rubric;
  bool self_adjusted = false;
  std::vector<StratumCounts> strata;  // sorted by stratum id

  std::int64_t total() const;
  // Union of candidate ids across strata, sorted.
  std::vector<std::string> all_candidates() const;
};

// Collapses records to per-stratum count tensors.  With self_adjust, records
// whose judge and candidate share a family are dropped first; losing every
// record of a previously present candidate is an error, not a silent shrink.
SufficientCounts tabulate(const ScoreDataset& ds, bool self_adjust);

// Empirical per-judge assigned-label distributions, pooling strata.  Inner map
// is candidate -> distribution over assigned levels.
std::map<std::string, std::map<std::string, Vec>> empirical_marginals(
    const ScoreDataset& ds);

// Pooled over judges as well.
std::map<std::string, Vec> pooled_marginals(const ScoreDataset& ds);

}  // namespace simplexrank
