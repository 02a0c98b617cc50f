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

#include "simplexrank/counts.hpp"

#include <algorithm>
#include <set>

namespace simplexrank {

namespace {

int index_of(const std::vector<std::string>& v, const std::string& id) {
  auto it = std::lower_bound(v.begin(), v.end(), id);
  if (it == v.end() || *it != id) return -1;
  return static_cast<int>(it - v.begin());
}

}  // namespace

int StratumCounts::judge_index(const std::string& id) const {
  return index_of(judge_ids, id);
}

int StratumCounts::candidate_index(const std::string& id) const {
  return index_of(candidate_ids, id);
}

std::int64_t SufficientCounts::total() const {
  std::int64_t t = 0;
  for (const auto& s : strata) t += s.total;
  return t;
}

std::vector<std::string> SufficientCounts::all_candidates() const {
  std::set<std::string> ids;
  for (const auto& s : strata)
    ids.insert(s.candidate_ids.begin(), s.candidate_ids.end());
  return {ids.begin(), ids.end()};
}

SufficientCounts tabulate(const ScoreDataset& ds, bool self_adjust) {
  ds.rubric.check();
  if (ds.records.empty()) fail("EmptyDataset", "no records to tabulate");
  const int mp = ds.rubric.assigned_levels;

  std::set<std::string> candidates_before;
  for (const auto& r : ds.records) candidates_before.insert(r.candidate_id);

  std::vector<const ScoreRecord*> kept;
  kept.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    if (r.level < 1 || r.level > mp)
      fail("BadLevel", "record level " + std::to_string(r.level) +
                           " outside 1.." + std::to_string(mp));
    if (self_adjust && ds.family_of_judge(r.judge_id) ==
                           ds.family_of_candidate(r.candidate_id))
      continue;
    kept.push_back(&r);
  }

  std::set<std::string> candidates_after;
  for (const auto* r : kept) candidates_after.insert(r->candidate_id);
  for (const auto& c : candidates_before) {
    if (!candidates_after.count(c))
      fail("EmptyAfterFilter",
           "candidate '" + c + "' has no scores left after family filtering");
  }
  if (kept.empty()) fail("EmptyAfterFilter", "no records left after filtering");

  // Group records by stratum with sorted id spaces per stratum.
  std::map<std::string, std::vector<const ScoreRecord*>> by_stratum;
  for (const auto* r : kept) by_stratum[r->stratum].push_back(r);

  SufficientCounts out;
  out.rubric = ds.rubric;
  out.self_adjusted = self_adjust;
  for (const auto& [stratum, recs] : by_stratum) {
    StratumCounts sc;
    sc.stratum = stratum;
    std::set<std::string> js, cs, qs;
    for (const auto* r : recs) {
      js.insert(r->judge_id);
      cs.insert(r->candidate_id);
      qs.insert(r->question_id);
    }
    sc.judge_ids.assign(js.begin(), js.end());
    sc.candidate_ids.assign(cs.begin(), cs.end());
    sc.question_count = static_cast<std::int64_t>(qs.size());
    sc.n.assign(sc.judge_ids.size(),
                CountMat::Zero(static_cast<int>(sc.candidate_ids.size()), mp));
    for (const auto* r : recs) {
      const int j = sc.judge_index(r->judge_id);
      const int k = sc.candidate_index(r->candidate_id);
      sc.n[static_cast<std::size_t>(j)](k, r->level - 1) += 1;
      sc.total += 1;
    }
    out.strata.push_back(std::move(sc));
  }
  return out;
}

std::map<std::string, std::map<std::string, Vec>> empirical_marginals(
    const ScoreDataset& ds) {
  ds.rubric.check();
  const int mp = ds.rubric.assigned_levels;
  std::map<std::string, std::map<std::string, Vec>> counts;
  for (const auto& r : ds.records) {
    auto& v = counts[r.judge_id][r.candidate_id];
    if (v.size() == 0) v = Vec::Zero(mp);
    if (r.level < 1 || r.level > mp) fail("BadLevel", "record level out of range");
    v[r.level - 1] += 1.0;
  }
  for (auto& [j, per_cand] : counts)
    for (auto& [k, v] : per_cand) v /= v.sum();
  return counts;
}

std::map<std::string, Vec> pooled_marginals(const ScoreDataset& ds) {
  ds.rubric.check();
  const int mp = ds.rubric.assigned_levels;
  std::map<std::string, Vec> counts;
  for (const auto& r : ds.records) {
    auto& v = counts[r.candidate_id];
    if (v.size() == 0) v = Vec::Zero(mp);
    if (r.level < 1 || r.level > mp) fail("BadLevel", "record level out of range");
    v[r.level - 1] += 1.0;
  }
  for (auto& [k, v] : counts) v /= v.sum();
  return counts;
}

}  // namespace simplexrank
