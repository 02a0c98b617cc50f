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

#include "simplexrank/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace simplexrank {

namespace {

// Halves every chain, dropping a middle element when the length is odd.
std::vector<Vec> split_halves(const std::vector<Vec>& chains) {
  std::vector<Vec> out;
  out.reserve(chains.size() * 2);
  for (const auto& c : chains) {
    const Eigen::Index n = c.size() / 2;
    if (n < 2) fail("TooFewDraws", "need at least 4 draws per chain");
    out.push_back(c.head(n));
    out.push_back(c.tail(n));
  }
  return out;
}

struct Moments {
  double within = 0.0;    // mean of per-sequence sample variances
  double var_plus = 0.0;  // pooled posterior variance estimate
  std::vector<double> means;
  Eigen::Index len = 0;
};

Moments sequence_moments(const std::vector<Vec>& seqs) {
  Moments mo;
  mo.len = seqs.front().size();
  for (const auto& s : seqs) {
    if (s.size() != mo.len) fail("BadDimension", "sequences must share a length");
    const double mean = s.mean();
    mo.means.push_back(mean);
    mo.within += (s.array() - mean).square().sum() / static_cast<double>(mo.len - 1);
  }
  mo.within /= static_cast<double>(seqs.size());
  double grand = 0.0;
  for (double m : mo.means) grand += m;
  grand /= static_cast<double>(mo.means.size());
  double between = 0.0;  // n * var(means)
  for (double m : mo.means) between += (m - grand) * (m - grand);
  between *= static_cast<double>(mo.len) / static_cast<double>(mo.means.size() - 1);
  const double n = static_cast<double>(mo.len);
  mo.var_plus = (n - 1.0) / n * mo.within + between / n;
  return mo;
}

// Biased autocovariance (normalized by n) at a single lag.
double autocov(const Vec& s, double mean, Eigen::Index lag) {
  const Eigen::Index n = s.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i + lag < n; ++i)
    acc += (s[i] - mean) * (s[i + lag] - mean);
  return acc / static_cast<double>(n);
}

}  // namespace

double split_rhat(const std::vector<Vec>& chains) {
  if (chains.size() < 2) fail("TooFewChains", "need at least two chains");
  const std::vector<Vec> seqs = split_halves(chains);
  const Moments mo = sequence_moments(seqs);
  if (mo.within <= 0.0) {
    double lo = *std::min_element(mo.means.begin(), mo.means.end());
    double hi = *std::max_element(mo.means.begin(), mo.means.end());
    return hi > lo ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return std::sqrt(mo.var_plus / mo.within);
}

double rank_normalized_ess(const std::vector<Vec>& chains) {
  if (chains.empty()) fail("TooFewChains", "need at least one chain");
  // Rank-normalize across the pooled draws, ties averaged, then map ranks
  // through the normal quantile with the usual 3/8 offset.
  std::vector<double> pooled;
  for (const auto& c : chains)
    for (Eigen::Index i = 0; i < c.size(); ++i) pooled.push_back(c[i]);
  const double total = static_cast<double>(pooled.size());
  std::vector<double> ranks = average_ranks(pooled, /*higher_better=*/false);
  std::vector<Vec> normed;
  std::size_t at = 0;
  for (const auto& c : chains) {
    Vec z(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      z[i] = inv_normal_cdf((ranks[at++] - 0.375) / (total + 0.25));
    normed.push_back(std::move(z));
  }

  const std::vector<Vec> seqs = split_halves(normed);
  const Moments mo = sequence_moments(seqs);
  if (!(mo.var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::Index n = mo.len;
  const double num_seqs = static_cast<double>(seqs.size());
  const double draws = static_cast<double>(n) * num_seqs;

  auto mean_acov = [&](Eigen::Index lag) {
    double acc = 0.0;
    for (std::size_t s = 0; s < seqs.size(); ++s)
      acc += autocov(seqs[s], mo.means[s], lag);
    return acc / num_seqs;
  };
  auto rho = [&](Eigen::Index lag) {
    return 1.0 - (mo.within - mean_acov(lag)) / mo.var_plus;
  };

  // Geyer: sum autocorrelations in consecutive pairs while the pair sums stay
  // positive, never letting a pair exceed the previous one.
  double rho0 = rho(0);
  double tau_pairs = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t + 1 < n; t += 2) {
    double pair = rho(t) + rho(t + 1);
    if (t > 0 && pair <= 0.0) break;
    if (pair > prev_pair) pair = prev_pair;
    tau_pairs += pair;
    prev_pair = pair;
  }
  double tau = 2.0 * tau_pairs - rho0;
  if (tau < 1.0 / std::log10(draws + 10.0)) tau = 1.0 / std::log10(draws + 10.0);
  double ess = draws / tau;
  const double cap = draws * std::log10(draws);
  return std::min(ess, cap);
}

ScalarDiagnostics diagnose_scalar(const std::vector<Vec>& chains) {
  return {split_rhat(chains), rank_normalized_ess(chains)};
}

}  // namespace simplexrank
