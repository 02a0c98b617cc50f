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

#include "simplexrank/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "simplexrank/summary.hpp"

namespace simplexrank {

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    fail("SingleCandidate", "rank correlation of a constant sequence");
  return sxy / std::sqrt(sxx * syy);
}

// Average position per id: tied ids share the mean of their slots.
std::map<std::string, double> tie_averaged_positions(const Ranking& r) {
  std::map<std::string, double> out;
  std::size_t pos = 1;
  for (const auto& group : r.tie_groups) {
    const double avg =
        static_cast<double>(pos) + 0.5 * static_cast<double>(group.size() - 1);
    for (const auto& id : group) out[id] = avg;
    pos += group.size();
  }
  return out;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail("BadDimension", "sequences must share a length");
  if (x.size() < 2) fail("SingleCandidate", "need at least two points");
  return pearson(average_ranks(x), average_ranks(y));
}

double spearman(const Ranking& a, const Ranking& b) {
  const auto pa = tie_averaged_positions(a);
  const auto pb = tie_averaged_positions(b);
  if (pa.size() != pb.size()) fail("BadDimension", "rankings cover different ids");
  std::vector<double> x, y;
  for (const auto& [id, rank] : pa) {
    auto it = pb.find(id);
    if (it == pb.end()) fail("BadDimension", "rankings cover different ids");
    x.push_back(rank);
    y.push_back(it->second);
  }
  if (x.size() < 2) fail("SingleCandidate", "need at least two ids");
  return pearson(x, y);
}

double coverage(const std::vector<std::pair<double, double>>& intervals,
                const std::vector<double>& truths) {
  if (intervals.size() != truths.size() || intervals.empty())
    fail("BadDimension", "intervals and truths must align");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i)
    if (truths[i] >= intervals[i].first && truths[i] <= intervals[i].second) ++hit;
  return static_cast<double>(hit) / static_cast<double>(intervals.size());
}

double rank_coverage(const std::vector<const RankReport*>& reports,
                     const Ranking& truth) {
  const auto true_ranks = truth.competition_ranks();
  std::int64_t hit = 0, total = 0;
  for (const RankReport* rp : reports) {
    for (const auto& c : rp->candidates) {
      auto it = true_ranks.find(c.candidate_id);
      if (it == true_ranks.end())
        fail("BadDimension", "truth does not cover '" + c.candidate_id + "'");
      ++total;
      if (it->second >= c.rank_lo && it->second <= c.rank_hi) ++hit;
    }
  }
  if (total == 0) fail("EmptySample", "no candidates in any report");
  return static_cast<double>(hit) / static_cast<double>(total);
}

CollapseMap CollapseMap::identity(int levels) {
  CollapseMap cm;
  cm.out_levels = levels;
  for (int i = 1; i <= levels; ++i) cm.to_level.push_back(i);
  return cm;
}

CollapseMap CollapseMap::named(const std::string& name) {
  CollapseMap cm;
  cm.out_levels = 3;
  if (name == "tldr") {
    cm.to_level = {2, 1, 1, 2, 2, 3};
  } else if (name == "mtbench") {
    cm.to_level = {2, 1, 1, 2, 3, 3};
  } else {
    fail("BadConfig", "unknown collapse map '" + name + "'");
  }
  return cm;
}

CollapseMap CollapseMap::parse(const std::string& text) {
  CollapseMap cm;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used > 0 && used < tok.size() &&
           std::isspace(static_cast<unsigned char>(tok[used])))
      ++used;
    if (used == 0 || used != tok.size())
      fail("BadFormat", "collapse map entry '" + tok + "' is not an integer");
    cm.to_level.push_back(v);
  }
  if (cm.to_level.empty()) fail("BadConfig", "empty collapse map");
  cm.out_levels = *std::max_element(cm.to_level.begin(), cm.to_level.end());
  cm.check();
  return cm;
}

void CollapseMap::check() const {
  if (to_level.empty()) fail("BadConfig", "empty collapse map");
  std::vector<bool> seen(static_cast<std::size_t>(out_levels) + 1, false);
  for (int v : to_level) {
    if (v < 1 || v > out_levels) fail("BadConfig", "collapse target out of range");
    seen[static_cast<std::size_t>(v)] = true;
  }
  for (int v = 1; v <= out_levels; ++v)
    if (!seen[static_cast<std::size_t>(v)])
      fail("BadConfig", "collapse map skips level " + std::to_string(v));
}

ScoreDataset collapse_scores(const ScoreDataset& ds, const CollapseMap& map) {
  map.check();
  if (static_cast<int>(map.to_level.size()) != ds.rubric.assigned_levels)
    fail("BadDimension", "collapse map does not match assigned levels");
  ScoreDataset out;
  out.rubric = RubricSpec::make(map.out_levels, map.out_levels);
  out.judge_family = ds.judge_family;
  out.candidate_family = ds.candidate_family;
  out.records.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    if (r.level < 1 || r.level > static_cast<int>(map.to_level.size()))
      fail("BadLevel", "record level outside the collapse map");
    ScoreRecord nr = r;
    nr.level = map.to_level[static_cast<std::size_t>(r.level - 1)];
    out.records.push_back(std::move(nr));
  }
  return out;
}

}  // namespace simplexrank
