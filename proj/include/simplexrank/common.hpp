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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace simplexrank {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CountMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Library errors carry a stable machine-readable code next to the message so
// callers (and the command-line tool) can branch on the failure kind.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

inline double logistic(double x) {
  // Stable on both tails.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline bool is_distribution(const Eigen::Ref<const Vec>& w, double tol = 1e-10) {
  if (w.size() == 0) return false;
  if ((w.array() < 0.0).any() || (w.array() > 1.0).any()) return false;
  return std::abs(w.sum() - 1.0) <= tol;
}

inline void check_distribution(const Eigen::Ref<const Vec>& w, const char* what,
                               double tol = 1e-10) {
  if (!is_distribution(w, tol))
    fail("InvalidDistribution", std::string(what) + " is not a probability vector");
}

// Compensated accumulator; keeps long likelihood reductions accurate when the
// record count is large.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, stream) pair; chains and generator substreams
// derive their engines here so runs are reproducible regardless of scheduling.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
  return std::mt19937_64(s);
}

inline double sample_gamma(double shape, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

inline Vec sample_dirichlet(const Eigen::Ref<const Vec>& conc, std::mt19937_64& rng) {
  Vec x(conc.size());
  for (Eigen::Index i = 0; i < conc.size(); ++i) x[i] = sample_gamma(conc[i], rng);
  double s = x.sum();
  if (s <= 0.0) {
    // Underflow with tiny concentrations; fall back to the argmax corner.
    Eigen::Index imax;
    conc.maxCoeff(&imax);
    x.setZero();
    x[imax] = 1.0;
    return x;
  }
  return x / s;
}

inline double sample_beta(double a, double b, std::mt19937_64& rng) {
  double x = sample_gamma(a, rng);
  double y = sample_gamma(b, rng);
  if (x + y <= 0.0) return a > b ? 1.0 : 0.0;
  return x / (x + y);
}

inline double dirichlet_log_pdf(const Eigen::Ref<const Vec>& x,
                                const Eigen::Ref<const Vec>& conc) {
  double lp = std::lgamma(conc.sum());
  for (Eigen::Index i = 0; i < conc.size(); ++i) {
    lp -= std::lgamma(conc[i]);
    lp += (conc[i] - 1.0) * std::log(x[i]);
  }
  return lp;
}

inline double beta_log_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) -
         std::lgamma(a) - std::lgamma(b);
}

// Lower empirical quantile (inverse CDF): smallest element with at least a
// fraction p of the sample at or below it.  Integer-valued samples stay
// integer-valued, which keeps rank intervals exact.
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) fail("EmptySample", "quantile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  std::size_t idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  if (idx == 0) idx = 1;
  return sorted[idx - 1];
}

// Average ranks (1-based) with ties averaged, larger scores ranked better when
// higher_better is set.
inline std::vector<double> average_ranks(const std::vector<double>& scores,
                                         bool higher_better = true) {
  std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_better ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Competition ranks: tied candidates share the best rank of their group.
inline std::vector<int> min_ranks(const std::vector<double>& scores,
                                  bool higher_better = true) {
  std::size_t n = scores.size();
  std::vector<int> ranks(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int better = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (higher_better ? scores[j] > scores[i] : scores[j] < scores[i]) ++better;
    }
    ranks[i] = better + 1;
  }
  return ranks;
}

// Acklam's rational approximation to the standard normal quantile; absolute
// error below 1.2e-9 over (0, 1), plenty for rank-normalized diagnostics.
inline double inv_normal_cdf(double p) {
  if (p <= 0.0 || p >= 1.0) fail("DomainError", "inv_normal_cdf needs p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace simplexrank
