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

#include "simplexrank/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace simplexrank {

namespace {

struct MeanAcc {
  double sum = 0.0;
  double sumsq = 0.0;
  std::int64_t n = 0;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double sd() const {
    if (n < 2) return 0.0;
    double v = (sumsq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }
};

RankReport report_from_means(const std::map<std::string, MeanAcc>& acc,
                             const std::string& method) {
  if (acc.empty()) fail("EmptyDataset", "no records to average");
  RankReport report;
  report.method = method;
  std::vector<std::pair<std::string, double>> point;
  std::vector<CandidateSummary> rows;
  for (const auto& [id, a] : acc) {
    CandidateSummary cs;
    cs.candidate_id = id;
    cs.score_mean = a.mean();
    const double half = 1.959963984540054 * a.sd() / std::sqrt(static_cast<double>(a.n));
    cs.score_lo = cs.score_mean - half;
    cs.score_hi = cs.score_mean + half;
    point.emplace_back(id, cs.score_mean);
    rows.push_back(std::move(cs));
  }
  // Rank bounds by interval inversion: a candidate surely trails everyone
  // whose point mean clears its upper bound, and can at best trail those
  // clearing its lower bound.
  for (auto& cs : rows) {
    int above_hi = 0, above_lo = 0;
    for (const auto& [id, mean] : point) {
      if (id == cs.candidate_id) continue;
      if (mean > cs.score_hi) ++above_hi;
      if (mean > cs.score_lo) ++above_lo;
    }
    cs.rank_lo = 1 + above_hi;
    cs.rank_hi = 1 + above_lo;
  }
  report.ranking = make_ranking(point);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < rows.size(); ++i) pos[rows[i].candidate_id] = i;
  for (const auto& id : report.ranking.order) {
    CandidateSummary cs = rows[pos.at(id)];
    cs.rank_mean = static_cast<double>(report.ranking.competition_ranks().at(id));
    report.candidates.push_back(std::move(cs));
  }
  return report;
}

}  // namespace

RankReport simple_average(const ScoreDataset& ds) {
  ds.rubric.check();
  std::map<std::string, MeanAcc> acc;
  for (const auto& r : ds.records)
    acc[r.candidate_id].add(static_cast<double>(r.level - 1));
  return report_from_means(acc, "simple_average");
}

SingleJudgeResult single_judge(const ScoreDataset& ds) {
  SingleJudgeResult out;
  out.pooled = simple_average(ds);
  out.pooled.method = "single_judge";
  std::map<std::string, std::map<std::string, MeanAcc>> per_judge;
  for (const auto& r : ds.records)
    per_judge[r.judge_id][r.candidate_id].add(static_cast<double>(r.level - 1));
  for (const auto& [jid, acc] : per_judge)
    out.per_judge[jid] = report_from_means(acc, "single_judge:" + jid);
  return out;
}

RankReport bootstrap_rank_ci(const ScoreDataset& ds, int replicates,
                             std::uint64_t seed) {
  ds.rubric.check();
  if (replicates < 1) fail("BadConfig", "need at least one replicate");
  // Question-level sums per candidate so a replicate is a weighted recount.
  std::set<std::string> cand_set;
  for (const auto& r : ds.records) cand_set.insert(r.candidate_id);
  std::vector<std::string> cands(cand_set.begin(), cand_set.end());
  const int num_cands = static_cast<int>(cands.size());
  auto cand_index = [&](const std::string& id) {
    return static_cast<int>(std::lower_bound(cands.begin(), cands.end(), id) -
                            cands.begin());
  };

  struct QuestionCell {
    Vec sum;
    Vec count;
  };
  std::map<std::string, std::map<std::string, QuestionCell>> by_stratum;
  for (const auto& r : ds.records) {
    auto& cell = by_stratum[r.stratum][r.question_id];
    if (cell.sum.size() == 0) {
      cell.sum = Vec::Zero(num_cands);
      cell.count = Vec::Zero(num_cands);
    }
    const int k = cand_index(r.candidate_id);
    cell.sum[k] += static_cast<double>(r.level - 1);
    cell.count[k] += 1.0;
  }

  std::vector<std::vector<const QuestionCell*>> strata_cells;
  for (const auto& [stratum, qs] : by_stratum) {
    std::vector<const QuestionCell*> cells;
    for (const auto& [qid, cell] : qs) cells.push_back(&cell);
    strata_cells.push_back(std::move(cells));
  }

  std::mt19937_64 rng = make_rng(seed, 0xb007u);
  std::vector<std::vector<double>> rank_draws(static_cast<std::size_t>(num_cands));
  std::vector<std::vector<double>> score_draws(static_cast<std::size_t>(num_cands));
  for (int rep = 0; rep < replicates; ++rep) {
    Vec sum = Vec::Zero(num_cands), count = Vec::Zero(num_cands);
    bool complete = false;
    for (int attempt = 0; attempt < 100 && !complete; ++attempt) {
      sum.setZero();
      count.setZero();
      for (const auto& cells : strata_cells) {
        std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
        for (std::size_t q = 0; q < cells.size(); ++q) {
          const QuestionCell* cell = cells[pick(rng)];
          sum += cell->sum;
          count += cell->count;
        }
      }
      complete = (count.array() > 0.0).all();
    }
    if (!complete)
      fail("DegenerateSample", "bootstrap could not cover every candidate");
    std::vector<double> means(static_cast<std::size_t>(num_cands));
    for (int k = 0; k < num_cands; ++k) means[static_cast<std::size_t>(k)] = sum[k] / count[k];
    std::vector<int> ranks = min_ranks(means);
    for (int k = 0; k < num_cands; ++k) {
      rank_draws[static_cast<std::size_t>(k)].push_back(static_cast<double>(ranks[static_cast<std::size_t>(k)]));
      score_draws[static_cast<std::size_t>(k)].push_back(means[static_cast<std::size_t>(k)]);
    }
  }

  // Point estimates from the original sample.
  std::map<std::string, MeanAcc> acc;
  for (const auto& r : ds.records)
    acc[r.candidate_id].add(static_cast<double>(r.level - 1));

  RankReport report;
  report.method = "bootstrap";
  report.extras["replicates"] = static_cast<double>(replicates);
  std::vector<std::pair<std::string, double>> point;
  std::vector<CandidateSummary> rows;
  for (int k = 0; k < num_cands; ++k) {
    const std::string& id = cands[static_cast<std::size_t>(k)];
    CandidateSummary cs;
    cs.candidate_id = id;
    cs.score_mean = acc.at(id).mean();
    auto ssort = score_draws[static_cast<std::size_t>(k)];
    auto rsort = rank_draws[static_cast<std::size_t>(k)];
    std::sort(ssort.begin(), ssort.end());
    std::sort(rsort.begin(), rsort.end());
    cs.score_lo = sorted_quantile(ssort, 0.025);
    cs.score_hi = sorted_quantile(ssort, 0.975);
    cs.rank_lo = static_cast<int>(sorted_quantile(rsort, 0.025));
    cs.rank_hi = static_cast<int>(sorted_quantile(rsort, 0.975));
    double mr = 0.0;
    for (double v : rsort) mr += v;
    cs.rank_mean = mr / static_cast<double>(rsort.size());
    point.emplace_back(id, cs.score_mean);
    rows.push_back(std::move(cs));
  }
  report.ranking = make_ranking(point);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < rows.size(); ++i) pos[rows[i].candidate_id] = i;
  for (const auto& id : report.ranking.order) report.candidates.push_back(rows[pos.at(id)]);
  return report;
}

PairwiseCounts pairwise_from_dataset(const ScoreDataset& ds) {
  std::set<std::string> cand_set;
  for (const auto& r : ds.records) cand_set.insert(r.candidate_id);
  PairwiseCounts pc;
  pc.ids.assign(cand_set.begin(), cand_set.end());
  const int n = static_cast<int>(pc.ids.size());
  pc.wins = Mat::Zero(n, n);
  pc.ties = Mat::Zero(n, n);
  auto index = [&](const std::string& id) {
    return static_cast<int>(std::lower_bound(pc.ids.begin(), pc.ids.end(), id) -
                            pc.ids.begin());
  };
  // Levels grouped per (stratum, question, judge).
  std::map<std::string, std::vector<std::pair<int, int>>> groups;
  for (const auto& r : ds.records) {
    std::string key = r.stratum;
    key += '\x1f';
    key += r.question_id;
    key += '\x1f';
    key += r.judge_id;
    groups[key].emplace_back(index(r.candidate_id), r.level);
  }
  for (const auto& [key, members] : groups) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto& [ia, la] = members[a];
        const auto& [ib, lb] = members[b];
        if (ia == ib) continue;
        if (la > lb) {
          pc.wins(ia, ib) += 1.0;
        } else if (lb > la) {
          pc.wins(ib, ia) += 1.0;
        } else {
          pc.ties(ia, ib) += 1.0;
          pc.ties(ib, ia) += 1.0;
        }
      }
    }
  }
  return pc;
}

double rao_kupper_log_likelihood(const PairwiseCounts& pc, const Vec& lambda,
                                 double nu) {
  const int n = static_cast<int>(pc.ids.size());
  if (lambda.size() != n) fail("BadDimension", "worth vector length mismatch");
  if (!(nu >= 1.0)) fail("BadConfig", "tie parameter must be at least 1");
  KahanSum lp;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double wij = pc.wins(i, j), wji = pc.wins(j, i), tij = pc.ties(i, j);
      if (wij + wji + tij == 0.0) continue;
      const double di = lambda[i] + nu * lambda[j];
      const double dj = lambda[j] + nu * lambda[i];
      lp.add(wij * (std::log(lambda[i]) - std::log(di)));
      lp.add(wji * (std::log(lambda[j]) - std::log(dj)));
      if (tij > 0.0)
        lp.add(tij * (std::log(nu * nu - 1.0) + std::log(lambda[i]) +
                      std::log(lambda[j]) - std::log(di) - std::log(dj)));
    }
  }
  return lp.value();
}

namespace {

// Connected components of the "any comparisons" graph.
std::vector<std::vector<int>> comparison_components(const PairwiseCounts& pc) {
  const int n = static_cast<int>(pc.ids.size());
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack = {s}, members;
    comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (int u = 0; u < n; ++u) {
        if (comp[static_cast<std::size_t>(u)] >= 0) continue;
        if (pc.wins(v, u) + pc.wins(u, v) + pc.ties(v, u) > 0.0) {
          comp[static_cast<std::size_t>(u)] = static_cast<int>(out.size());
          stack.push_back(u);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return out;
}

// One minorization pass plus the tie-parameter solve, restricted to the
// member set.  lambda entries outside stay untouched.
void rk_fit_component(const PairwiseCounts& pc, const std::vector<int>& members,
                      Vec& lambda, double& nu, int max_iters, int* iters_used) {
  const double total_ties = [&] {
    double t = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        t += pc.ties(members[a], members[b]);
    return t;
  }();

  auto solve_nu = [&]() {
    if (total_ties <= 0.0) return 1.0;
    auto rhs = [&](double v) {
      double s = 0.0;
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const int i = members[a], j = members[b];
          const double tij = pc.ties(i, j);
          const double wij = pc.wins(i, j), wji = pc.wins(j, i);
          if (wij + wji + tij == 0.0) continue;
          s += (wij + tij) * lambda[j] / (lambda[i] + v * lambda[j]);
          s += (wji + tij) * lambda[i] / (lambda[j] + v * lambda[i]);
        }
      }
      return s;
    };
    auto f = [&](double v) { return 2.0 * v * total_ties / (v * v - 1.0) - rhs(v); };
    double lo = 1.0 + 1e-9, hi = 2.0;
    while (f(hi) > 0.0 && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (f(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  // Scale invariance makes the log-coordinate gradient sum to zero, so its
  // plain norm (plus the tie-parameter stationarity residual) is the right
  // convergence measure.
  auto grad_norm = [&]() {
    double ss = 0.0;
    for (const int i : members) {
      double g = 0.0;
      for (const int j : members) {
        if (j == i) continue;
        const double wij = pc.wins(i, j), wji = pc.wins(j, i), tij = pc.ties(i, j);
        if (wij + wji + tij == 0.0) continue;
        g += wij + tij;
        g -= (wij + tij) * lambda[i] / (lambda[i] + nu * lambda[j]);
        g -= (wji + tij) * nu * lambda[i] / (lambda[j] + nu * lambda[i]);
      }
      ss += g * g;
    }
    if (total_ties > 0.0) {
      double s = 0.0;
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const int i = members[a], j = members[b];
          const double tij = pc.ties(i, j);
          const double wij = pc.wins(i, j), wji = pc.wins(j, i);
          if (wij + wji + tij == 0.0) continue;
          s += (wij + tij) * lambda[j] / (lambda[i] + nu * lambda[j]);
          s += (wji + tij) * lambda[i] / (lambda[j] + nu * lambda[i]);
        }
      }
      const double gnu = 2.0 * nu * total_ties / (nu * nu - 1.0) - s;
      ss += gnu * gnu;
    }
    return std::sqrt(ss);
  };

  for (const int i : members) lambda[i] = 1.0;
  nu = total_ties > 0.0 ? 1.5 : 1.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    double max_delta = 0.0;
    Vec fresh = lambda;
    for (const int i : members) {
      double num = 0.0, den = 0.0;
      for (const int j : members) {
        if (j == i) continue;
        const double wij = pc.wins(i, j), wji = pc.wins(j, i), tij = pc.ties(i, j);
        if (wij + wji + tij == 0.0) continue;
        num += wij + tij;
        den += (wij + tij) / (lambda[i] + nu * lambda[j]);
        den += (wji + tij) * nu / (lambda[j] + nu * lambda[i]);
      }
      // A pure loser has no finite maximizer; peg it at a floor.
      fresh[i] = den > 0.0 ? std::max(num, 1e-8) / den : 1e-8;
    }
    // Normalize worths to the component size.
    double s = 0.0;
    for (const int i : members) s += fresh[i];
    const double scale = static_cast<double>(members.size()) / s;
    for (const int i : members) fresh[i] *= scale;
    for (const int i : members)
      max_delta = std::max(max_delta, std::abs(std::log(fresh[i] / lambda[i])));
    for (const int i : members) lambda[i] = fresh[i];
    const double nu_old = nu;
    nu = solve_nu();
    if (grad_norm() < 1e-8) break;
    if (max_delta < 1e-15 && std::abs(nu - nu_old) < 1e-15) break;
  }
  if (iters_used) *iters_used = std::max(*iters_used, it + 1);
}

}  // namespace

BradleyTerryResult fit_rao_kupper(const PairwiseCounts& pc, int max_iters) {
  const int n = static_cast<int>(pc.ids.size());
  if (n < 2) fail("InsufficientData", "need at least two candidates to compare");
  BradleyTerryResult out;
  out.ids = pc.ids;
  out.lambda = Vec::Ones(n);
  const auto comps = comparison_components(pc);
  double nu_global = 1.0;
  int iters = 0;
  for (const auto& members : comps) {
    if (members.size() < 2) {
      out.lambda[members.front()] = 1.0;
      continue;
    }
    double nu = 1.0;
    rk_fit_component(pc, members, out.lambda, nu, max_iters, &iters);
    if (members == comps.front()) nu_global = nu;
  }
  out.nu = nu_global;
  out.iterations = iters;
  for (const auto& members : comps) {
    std::vector<std::string> names;
    for (int i : members) names.push_back(pc.ids[static_cast<std::size_t>(i)]);
    out.components.push_back(std::move(names));
  }

  out.report.method = "bradley_terry";
  out.report.extras["nu"] = out.nu;
  out.report.extras["components"] = static_cast<double>(comps.size());
  // Components are reported in sequence: order within a component follows the
  // fitted worths, and each later component trails the previous one outright.
  std::vector<CandidateSummary> rows;
  Ranking ranking;
  for (const auto& members : comps) {
    std::vector<std::pair<std::string, double>> point;
    for (int i : members)
      point.emplace_back(pc.ids[static_cast<std::size_t>(i)], out.lambda[i]);
    Ranking local = make_ranking(point);
    for (const auto& id : local.order) ranking.order.push_back(id);
    for (auto& g : local.tie_groups) ranking.tie_groups.push_back(std::move(g));
  }
  const auto comp_ranks = ranking.competition_ranks();
  for (const auto& id : ranking.order) {
    const int i = static_cast<int>(
        std::lower_bound(pc.ids.begin(), pc.ids.end(), id) - pc.ids.begin());
    CandidateSummary cs;
    cs.candidate_id = id;
    cs.score_mean = cs.score_lo = cs.score_hi = out.lambda[i];
    cs.rank_mean = static_cast<double>(comp_ranks.at(id));
    cs.rank_lo = cs.rank_hi = comp_ranks.at(id);
    rows.push_back(std::move(cs));
  }
  out.report.candidates = std::move(rows);
  out.report.ranking = std::move(ranking);
  return out;
}

BradleyTerryResult bradley_terry_ties(const ScoreDataset& ds, int replicates,
                                      std::uint64_t seed, int max_iters) {
  BradleyTerryResult out = fit_rao_kupper(pairwise_from_dataset(ds), max_iters);
  if (replicates < 1) return out;

  // Per-question pairwise tallies so a replicate is a sum of sampled blocks.
  const std::vector<std::string>& ids = out.ids;
  const int n = static_cast<int>(ids.size());
  auto index = [&](const std::string& id) {
    return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  struct Block {
    Mat wins, ties;
  };
  std::map<std::string, std::map<std::string, Block>> by_stratum;
  std::map<std::string, std::map<std::string, std::vector<std::pair<int, int>>>> judged;
  for (const auto& r : ds.records) {
    std::string qkey = r.stratum;
    qkey += '\x1f';
    qkey += r.question_id;
    judged[qkey][r.judge_id].emplace_back(index(r.candidate_id), r.level);
  }
  for (const auto& [qkey, per_judge] : judged) {
    const std::string stratum = qkey.substr(0, qkey.find('\x1f'));
    Block blk{Mat::Zero(n, n), Mat::Zero(n, n)};
    for (const auto& [jid, members] : per_judge) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const auto& [ia, la] = members[a];
          const auto& [ib, lb] = members[b];
          if (ia == ib) continue;
          if (la > lb) blk.wins(ia, ib) += 1.0;
          else if (lb > la) blk.wins(ib, ia) += 1.0;
          else {
            blk.ties(ia, ib) += 1.0;
            blk.ties(ib, ia) += 1.0;
          }
        }
      }
    }
    by_stratum[stratum][qkey] = std::move(blk);
  }
  std::vector<std::vector<const Block*>> strata_blocks;
  for (const auto& [stratum, qs] : by_stratum) {
    std::vector<const Block*> blocks;
    for (const auto& [qkey, blk] : qs) blocks.push_back(&blk);
    strata_blocks.push_back(std::move(blocks));
  }

  std::mt19937_64 rng = make_rng(seed, 0xb7u);
  std::vector<std::vector<double>> rank_draws(static_cast<std::size_t>(n));
  PairwiseCounts rep_pc;
  rep_pc.ids = ids;
  for (int rep = 0; rep < replicates; ++rep) {
    rep_pc.wins = Mat::Zero(n, n);
    rep_pc.ties = Mat::Zero(n, n);
    for (const auto& blocks : strata_blocks) {
      std::uniform_int_distribution<std::size_t> pick(0, blocks.size() - 1);
      for (std::size_t q = 0; q < blocks.size(); ++q) {
        const Block* blk = blocks[pick(rng)];
        rep_pc.wins += blk->wins;
        rep_pc.ties += blk->ties;
      }
    }
    BradleyTerryResult r = fit_rao_kupper(rep_pc, 2000);
    const auto ranks = r.report.ranking.competition_ranks();
    for (int i = 0; i < n; ++i)
      rank_draws[static_cast<std::size_t>(i)].push_back(
          static_cast<double>(ranks.at(ids[static_cast<std::size_t>(i)])));
  }
  for (auto& cs : out.report.candidates) {
    auto& draws = rank_draws[static_cast<std::size_t>(index(cs.candidate_id))];
    std::sort(draws.begin(), draws.end());
    cs.rank_lo = static_cast<int>(sorted_quantile(draws, 0.025));
    cs.rank_hi = static_cast<int>(sorted_quantile(draws, 0.975));
    double mr = 0.0;
    for (double v : draws) mr += v;
    cs.rank_mean = mr / static_cast<double>(draws.size());
  }
  out.report.extras["replicates"] = static_cast<double>(replicates);
  return out;
}

}  // namespace simplexrank
