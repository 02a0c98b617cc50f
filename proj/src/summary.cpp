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

#include "simplexrank/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "simplexrank/diagnostics.hpp"

namespace simplexrank {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RankReport summarize_ranks(const std::vector<std::string>& candidate_ids,
                           const std::vector<Mat>& score_draws,
                           bool with_diagnostics) {
  const int num_cands = static_cast<int>(candidate_ids.size());
  if (num_cands == 0) fail("EmptySample", "no candidates to summarize");
  if (score_draws.empty()) fail("EmptySample", "no draws to summarize");
  for (const auto& m : score_draws)
    if (m.cols() != num_cands || m.rows() == 0)
      fail("BadDimension", "score draw shape mismatch");

  std::vector<std::vector<double>> scores(static_cast<std::size_t>(num_cands));
  std::vector<std::vector<double>> ranks(static_cast<std::size_t>(num_cands));
  std::vector<double> row(static_cast<std::size_t>(num_cands));
  for (const auto& m : score_draws) {
    for (Eigen::Index d = 0; d < m.rows(); ++d) {
      for (int k = 0; k < num_cands; ++k) row[static_cast<std::size_t>(k)] = m(d, k);
      std::vector<int> r = min_ranks(row);
      for (int k = 0; k < num_cands; ++k) {
        scores[static_cast<std::size_t>(k)].push_back(row[static_cast<std::size_t>(k)]);
        ranks[static_cast<std::size_t>(k)].push_back(static_cast<double>(r[static_cast<std::size_t>(k)]));
      }
    }
  }

  RankReport report;
  std::vector<std::pair<std::string, double>> point;
  for (int k = 0; k < num_cands; ++k) {
    auto& sc = scores[static_cast<std::size_t>(k)];
    auto& rk = ranks[static_cast<std::size_t>(k)];
    CandidateSummary cs;
    cs.candidate_id = candidate_ids[static_cast<std::size_t>(k)];
    KahanSum mean_s, mean_r;
    for (double v : sc) mean_s.add(v);
    for (double v : rk) mean_r.add(v);
    cs.score_mean = mean_s.value() / static_cast<double>(sc.size());
    cs.rank_mean = mean_r.value() / static_cast<double>(rk.size());
    std::vector<double> ssort = sc, rsort = rk;
    std::sort(ssort.begin(), ssort.end());
    std::sort(rsort.begin(), rsort.end());
    cs.score_lo = sorted_quantile(ssort, 0.025);
    cs.score_hi = sorted_quantile(ssort, 0.975);
    cs.rank_lo = static_cast<int>(sorted_quantile(rsort, 0.025));
    cs.rank_hi = static_cast<int>(sorted_quantile(rsort, 0.975));
    if (with_diagnostics && score_draws.size() >= 2) {
      std::vector<Vec> chains;
      for (const auto& m : score_draws) chains.push_back(m.col(k));
      ScalarDiagnostics d = diagnose_scalar(chains);
      cs.rhat = d.rhat;
      cs.ess = d.ess;
    }
    point.emplace_back(cs.candidate_id, cs.score_mean);
    report.candidates.push_back(std::move(cs));
  }

  report.ranking = make_ranking(point);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < report.candidates.size(); ++i)
    pos[report.candidates[i].candidate_id] = i;
  std::vector<CandidateSummary> ordered;
  for (const auto& id : report.ranking.order)
    ordered.push_back(report.candidates[pos.at(id)]);
  report.candidates = std::move(ordered);
  return report;
}

std::string RankReport::to_tsv() const {
  std::ostringstream os;
  os << "# method=" << method << "\n";
  os << "# divergences=" << divergences << "\n";
  for (const auto& [k, v] : extras) os << "# " << k << "=" << fmt_double(v) << "\n";
  os << "candidate_id\trank\trank_mean\trank_lo\trank_hi\tscore_mean\tscore_lo\t"
        "score_hi\trhat\tess\n";
  const auto comp = ranking.competition_ranks();
  for (const auto& c : candidates) {
    os << c.candidate_id << '\t' << comp.at(c.candidate_id) << '\t'
       << fmt_double(c.rank_mean) << '\t' << c.rank_lo << '\t' << c.rank_hi << '\t'
       << fmt_double(c.score_mean) << '\t' << fmt_double(c.score_lo) << '\t'
       << fmt_double(c.score_hi) << '\t' << fmt_double(c.rhat) << '\t'
       << fmt_double(c.ess) << '\n';
  }
  return os.str();
}

std::string RankReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "simplexrank/report";
  j["schema_version"] = 1;
  j["method"] = method;
  j["divergences"] = divergences;
  nlohmann::ordered_json ex = nlohmann::ordered_json::object();
  for (const auto& [k, v] : extras) ex[k] = v;
  j["extras"] = ex;
  nlohmann::ordered_json cands = nlohmann::ordered_json::array();
  for (const auto& c : candidates) {
    nlohmann::ordered_json cj;
    cj["candidate_id"] = c.candidate_id;
    cj["score_mean"] = c.score_mean;
    cj["score_lo"] = c.score_lo;
    cj["score_hi"] = c.score_hi;
    cj["rank_mean"] = c.rank_mean;
    cj["rank_lo"] = c.rank_lo;
    cj["rank_hi"] = c.rank_hi;
    cj["rhat"] = c.rhat;
    cj["ess"] = c.ess;
    cands.push_back(cj);
  }
  j["candidates"] = cands;
  nlohmann::ordered_json rk;
  rk["order"] = ranking.order;
  rk["tie_groups"] = ranking.tie_groups;
  j["ranking"] = rk;
  return j.dump(2) + "\n";
}

RankReport RankReport::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("schema", "") != std::string("simplexrank/report"))
    fail("BadFormat", "not a report document");
  RankReport report;
  report.method = j.value("method", "");
  report.divergences = j.value("divergences", std::int64_t(0));
  if (j.contains("extras"))
    for (auto it = j["extras"].begin(); it != j["extras"].end(); ++it)
      report.extras[it.key()] = it.value().get<double>();
  for (const auto& cj : j.at("candidates")) {
    CandidateSummary c;
    c.candidate_id = cj.at("candidate_id").get<std::string>();
    c.score_mean = cj.at("score_mean").get<double>();
    c.score_lo = cj.at("score_lo").get<double>();
    c.score_hi = cj.at("score_hi").get<double>();
    c.rank_mean = cj.at("rank_mean").get<double>();
    c.rank_lo = cj.at("rank_lo").get<int>();
    c.rank_hi = cj.at("rank_hi").get<int>();
    c.rhat = cj.value("rhat", 0.0);
    c.ess = cj.value("ess", 0.0);
    report.candidates.push_back(std::move(c));
  }
  const auto& rk = j.at("ranking");
  report.ranking.order = rk.at("order").get<std::vector<std::string>>();
  report.ranking.tie_groups =
      rk.at("tie_groups").get<std::vector<std::vector<std::string>>>();
  return report;
}

}  // namespace simplexrank
