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
#include <optional>
#include <string>
#include <vector>

#include "simplexrank/common.hpp"

namespace simplexrank {

// Scoring rubric.  A candidate's latent quality takes one of `true_levels`
// values; a judge assigns one of `assigned_levels` labels.  Extra assigned
// labels beyond the true ones hold outcomes like abstentions, so
// assigned_levels >= true_levels always.
struct RubricSpec {
  int true_levels = 2;
  int assigned_levels = 2;
  Vec level_values;  // length true_levels, strictly increasing

  static RubricSpec make(int true_levels, int assigned_levels,
                         std::optional<Vec> values = std::nullopt);
  void check() const;
};

struct ScoreRecord {
  std::string question_id;
  std::string judge_id;
  std::string candidate_id;
  std::string stratum;
  int level = 0;  // 1-based assigned level
};

struct ScoreDataset {
  RubricSpec rubric;
  std::vector<ScoreRecord> records;
  std::map<std::string, std::string> judge_family;
  std::map<std::string, std::string> candidate_family;

  const std::string& family_of_judge(const std::string& id) const;
  const std::string& family_of_candidate(const std::string& id) const;
  // Fills missing family entries with the id itself.
  void default_families();
};

struct Hyperparameters {
  double omega = 0.0;     // random-effect strength; 0 disables the block
  double beta_max = 10.0; // diagonal boost scale for the judge prior
  Vec delta;              // concentration for the shared shift directions, length M
  bool self_adjust = true;

  static Hyperparameters make(int true_levels, double omega = 0.0,
                              double beta_max = 10.0, bool self_adjust = true);
  void check(int true_levels) const;
};

// Default shift-direction concentration: increasing weight toward higher
// levels (1, 4, 10, 20, ... for M = 1, 2, 3, 4, ...).
Vec default_delta(int true_levels);

// A full ordering, best first, with exact ties grouped.  tie_groups partitions
// `order` in order, one group per distinct score.
struct Ranking {
  std::vector<std::string> order;
  std::vector<std::vector<std::string>> tie_groups;

  bool contains(const std::string& id) const;
  // Competition ranks: every member of a tie group shares the group's best rank.
  std::map<std::string, int> competition_ranks() const;
};

Ranking make_ranking(const std::vector<std::pair<std::string, double>>& scores);

struct ValidationReport {
  bool empty = false;
  std::vector<std::string> bad_records;        // malformed fields / level range
  std::vector<std::string> duplicate_triples;  // repeated (question, judge, candidate)
  std::vector<std::string> judges_without_records;
  std::vector<std::string> missing_family;
  std::vector<std::string> self_only_candidates;  // unrankable after self-filter

  bool hard_ok() const {
    return !empty && bad_records.empty() && duplicate_triples.empty() &&
           missing_family.empty();
  }
  bool clean() const {
    return hard_ok() && judges_without_records.empty() && self_only_candidates.empty();
  }
  std::string to_string() const;
};

// Report-only: never throws on content problems.
ValidationReport validate_dataset(const ScoreDataset& ds);

}  // namespace simplexrank
