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

#include "simplexrank/core_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace simplexrank {

RubricSpec RubricSpec::make(int true_levels, int assigned_levels,
                            std::optional<Vec> values) {
  RubricSpec r;
  r.true_levels = true_levels;
  r.assigned_levels = assigned_levels;
  if (values) {
    r.level_values = *values;
  } else {
    r.level_values = Vec::LinSpaced(true_levels, 0.0, static_cast<double>(true_levels - 1));
  }
  r.check();
  return r;
}

void RubricSpec::check() const {
  if (true_levels < 2) fail("InvalidRubric", "need at least two true levels");
  if (assigned_levels < true_levels)
    fail("InvalidRubric", "assigned levels must cover the true levels");
  if (level_values.size() != true_levels)
    fail("InvalidRubric", "level_values length must equal true_levels");
  for (int m = 1; m < true_levels; ++m)
    if (level_values[m] <= level_values[m - 1])
      fail("InvalidRubric", "level_values must be strictly increasing");
}

const std::string& ScoreDataset::family_of_judge(const std::string& id) const {
  auto it = judge_family.find(id);
  return it != judge_family.end() ? it->second : id;
}

const std::string& ScoreDataset::family_of_candidate(const std::string& id) const {
  auto it = candidate_family.find(id);
  return it != candidate_family.end() ? it->second : id;
}

void ScoreDataset::default_families() {
  for (const auto& rec : records) {
    judge_family.emplace(rec.judge_id, rec.judge_id);
    candidate_family.emplace(rec.candidate_id, rec.candidate_id);
  }
}

Vec default_delta(int true_levels) {
  // Tetrahedral ramp: later levels get increasingly strong pull.
  Vec d(true_levels);
  for (int m = 0; m < true_levels; ++m)
    d[m] = static_cast<double>((m + 1) * (m + 2) * (m + 3)) / 6.0;
  return d;
}

Hyperparameters Hyperparameters::make(int true_levels, double omega, double beta_max,
                                      bool self_adjust) {
  Hyperparameters h;
  h.omega = omega;
  h.beta_max = beta_max;
  h.delta = default_delta(true_levels);
  h.self_adjust = self_adjust;
  h.check(true_levels);
  return h;
}

void Hyperparameters::check(int true_levels) const {
  if (omega < 0.0) fail("InvalidHyper", "omega must be nonnegative");
  if (beta_max < 0.0) fail("InvalidHyper", "beta_max must be nonnegative");
  if (delta.size() != true_levels)
    fail("InvalidHyper", "delta length must equal true_levels");
  if ((delta.array() <= 0.0).any()) fail("InvalidHyper", "delta must be positive");
}

bool Ranking::contains(const std::string& id) const {
  return std::find(order.begin(), order.end(), id) != order.end();
}

std::map<std::string, int> Ranking::competition_ranks() const {
  std::map<std::string, int> out;
  int next = 1;
  for (const auto& group : tie_groups) {
    for (const auto& id : group) out[id] = next;
    next += static_cast<int>(group.size());
  }
  return out;
}

Ranking make_ranking(const std::vector<std::pair<std::string, double>>& scores) {
  std::vector<std::pair<std::string, double>> sorted = scores;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Ranking r;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::vector<std::string> group;
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].second == sorted[i].second) {
      group.push_back(sorted[j].first);
      r.order.push_back(sorted[j].first);
      ++j;
    }
    r.tie_groups.push_back(std::move(group));
    i = j;
  }
  return r;
}

ValidationReport validate_dataset(const ScoreDataset& ds) {
  ValidationReport rep;
  rep.empty = ds.records.empty();

  std::unordered_map<std::string, int> triple_count;
  std::unordered_set<std::string> judges_seen, candidates_seen;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& rec = ds.records[i];
    std::ostringstream where;
    where << "record " << i;
    if (rec.question_id.empty() || rec.judge_id.empty() || rec.candidate_id.empty() ||
        rec.stratum.empty()) {
      rep.bad_records.push_back(where.str() + ": empty id field");
      continue;
    }
    if (rec.level < 1 || rec.level > ds.rubric.assigned_levels) {
      rep.bad_records.push_back(where.str() + ": level " + std::to_string(rec.level) +
                                " outside [1, " +
                                std::to_string(ds.rubric.assigned_levels) + "]");
    }
    judges_seen.insert(rec.judge_id);
    candidates_seen.insert(rec.candidate_id);
    ++triple_count[rec.question_id + "\x1f" + rec.judge_id + "\x1f" + rec.candidate_id];
  }
  for (const auto& [key, n] : triple_count) {
    if (n > 1) {
      std::string pretty = key;
      std::replace(pretty.begin(), pretty.end(), '\x1f', '/');
      rep.duplicate_triples.push_back(pretty + " (x" + std::to_string(n) + ")");
    }
  }
  std::sort(rep.duplicate_triples.begin(), rep.duplicate_triples.end());

  for (const auto& [judge, fam] : ds.judge_family) {
    (void)fam;
    if (!judges_seen.count(judge)) rep.judges_without_records.push_back(judge);
  }
  for (const auto& j : judges_seen)
    if (!ds.judge_family.count(j)) rep.missing_family.push_back("judge " + j);
  for (const auto& c : candidates_seen)
    if (!ds.candidate_family.count(c)) rep.missing_family.push_back("candidate " + c);
  std::sort(rep.missing_family.begin(), rep.missing_family.end());

  // Candidates whose every record comes from a judge of their own family would
  // lose all data under the self-preference filter.
  std::unordered_map<std::string, bool> has_foreign;
  for (const auto& rec : ds.records) {
    bool foreign =
        ds.family_of_judge(rec.judge_id) != ds.family_of_candidate(rec.candidate_id);
    auto [it, inserted] = has_foreign.emplace(rec.candidate_id, foreign);
    if (!inserted) it->second = it->second || foreign;
  }
  for (const auto& [cand, foreign] : has_foreign)
    if (!foreign) rep.self_only_candidates.push_back(cand);
  std::sort(rep.self_only_candidates.begin(), rep.self_only_candidates.end());

  return rep;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  if (empty) os << "dataset has no records\n";
  for (const auto& s : bad_records) os << "bad record: " << s << "\n";
  for (const auto& s : duplicate_triples) os << "duplicate: " << s << "\n";
  for (const auto& s : missing_family) os << "missing family: " << s << "\n";
  for (const auto& s : judges_without_records) os << "judge without records: " << s << "\n";
  for (const auto& s : self_only_candidates)
    os << "unrankable after self-filter: " << s << "\n";
  if (clean()) os << "ok\n";
  return os.str();
}

}  // namespace simplexrank
