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

#include <string>
#include <vector>

#include "simplexrank/core_model.hpp"

namespace simplexrank {

// Rank correlation with average ranks for ties.  The overload on rankings
// aligns by id and requires both to cover the same set.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const Ranking& a, const Ranking& b);

// Fraction of intervals containing their target, bounds inclusive.
double coverage(const std::vector<std::pair<double, double>>& intervals,
                const std::vector<double>& truths);

// Fraction of candidates whose true competition rank falls inside the
// report's rank interval, averaged across reports.
struct RankReport;  // from summary.hpp
double rank_coverage(const std::vector<const RankReport*>& reports,
                     const Ranking& truth);

// Many-level scores folded onto a coarser scale.  to_level maps the 1-based
// input level (via index level-1) to the 1-based output level.
struct CollapseMap {
  std::vector<int> to_level;
  int out_levels = 0;

  static CollapseMap identity(int levels);
  // Folds a 6-point 0..5 scale onto three levels.  "tldr" keeps only the top
  // raw score as top level; "mtbench" promotes the top two raw scores.
  static CollapseMap named(const std::string& name);
  // Comma-separated output level per input level, e.g. "2,1,1,2,2,3".
  static CollapseMap parse(const std::string& text);

  void check() const;
};

// Applies the map to every record and tightens the rubric to the collapsed
// scale (true and assigned levels both become out_levels).
ScoreDataset collapse_scores(const ScoreDataset& ds, const CollapseMap& map);

}  // namespace simplexrank
