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

#include "simplexrank/hmc.hpp"

#include <cmath>
#include <limits>
#include <thread>

namespace simplexrank {

namespace {

constexpr double kDivergenceGap = 1000.0;

struct DualAveraging {
  double mu = 0.0;
  double log_eps = 0.0;
  double log_eps_bar = 0.0;
  double h_bar = 0.0;
  int count = 0;
  double target = 0.8;

  void restart(double eps, double target_accept) {
    mu = std::log(10.0 * eps);
    log_eps = std::log(eps);
    log_eps_bar = std::log(eps);
    h_bar = 0.0;
    count = 0;
    target = target_accept;
  }

  void update(double accept_prob) {
    static constexpr double kGamma = 0.05, kT0 = 10.0, kKappa = 0.75;
    ++count;
    const double m = static_cast<double>(count);
    h_bar = (1.0 - 1.0 / (m + kT0)) * h_bar + (target - accept_prob) / (m + kT0);
    log_eps = mu - std::sqrt(m) / kGamma * h_bar;
    const double w = std::pow(m, -kKappa);
    log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
  }

  double current() const { return std::exp(log_eps); }
  double averaged() const { return std::exp(log_eps_bar); }
};

struct Phase {
  Vec y;
  Vec p;
  Vec grad;
  double lp = 0.0;
};

class ChainRunner {
 public:
  ChainRunner(const LogpGrad& target, int dim, const SamplerConfig& cfg,
              const ChainInit& init, int chain_index)
      : target_(target),
        dim_(dim),
        cfg_(cfg),
        rng_(make_rng(cfg.seed, static_cast<std::uint64_t>(chain_index))),
        inv_mass_(Vec::Ones(dim)) {
    initialize(init);
  }

  ChainResult run() {
    adapt();
    ChainResult out;
    out.draws.resize(cfg_.samples, dim_);
    out.logp.resize(cfg_.samples);
    int accepted = 0;
    for (int s = 0; s < cfg_.samples; ++s) {
      TransitionStats st = transition();
      if (st.diverged) ++out.divergences;
      if (st.accepted) ++accepted;
      out.draws.row(s) = y_.transpose();
      out.logp[s] = lp_;
    }
    out.step_size = eps_;
    out.inv_mass = inv_mass_;
    out.accept_rate =
        cfg_.samples > 0 ? static_cast<double>(accepted) / cfg_.samples : 0.0;
    return out;
  }

 private:
  struct TransitionStats {
    double accept_prob = 0.0;
    bool accepted = false;
    bool diverged = false;
  };

  void initialize(const ChainInit& init) {
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
      if (init) {
        y_ = init(rng_);
      } else {
        y_.resize(dim_);
        for (int i = 0; i < dim_; ++i) y_[i] = unif(rng_);
      }
      grad_.resize(dim_);
      lp_ = target_(y_, &grad_);
      if (std::isfinite(lp_) && grad_.allFinite()) return;
    }
    fail("InitFailed", "no finite starting point after 100 attempts");
  }

  Vec sample_momentum() {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = normal(rng_) / std::sqrt(inv_mass_[i]);
    return p;
  }

  double hamiltonian(double lp, const Vec& p) const {
    return -lp + 0.5 * p.cwiseProduct(p).dot(inv_mass_);
  }

  // One leapfrog trajectory from the current state; returns the proposal and
  // whether integration stayed finite.
  bool integrate(double eps, int steps, Phase* ph) {
    ph->y = y_;
    ph->p = sample_momentum();
    ph->grad = grad_;
    ph->lp = lp_;
    h0_ = hamiltonian(lp_, ph->p);
    for (int s = 0; s < steps; ++s) {
      ph->p += 0.5 * eps * ph->grad;
      ph->y += eps * inv_mass_.cwiseProduct(ph->p);
      ph->lp = target_(ph->y, &ph->grad);
      if (!std::isfinite(ph->lp) || !ph->grad.allFinite()) return false;
      ph->p += 0.5 * eps * ph->grad;
      const double h = hamiltonian(ph->lp, ph->p);
      if (!std::isfinite(h) || h - h0_ > kDivergenceGap) return false;
    }
    return true;
  }

  int trajectory_steps(double eps) {
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    double tau = cfg_.trajectory_length * jitter(rng_);
    int steps = static_cast<int>(std::lround(tau / eps));
    if (steps < 1) steps = 1;
    if (steps > cfg_.max_leapfrog) steps = cfg_.max_leapfrog;
    return steps;
  }

  TransitionStats transition() {
    TransitionStats st;
    Phase ph;
    const int steps = trajectory_steps(eps_);
    const bool finite = integrate(eps_, steps, &ph);
    if (!finite) {
      st.diverged = true;
      st.accept_prob = 0.0;
      return st;
    }
    const double h1 = hamiltonian(ph.lp, ph.p);
    const double delta = h1 - h0_;
    if (!std::isfinite(delta) || delta > kDivergenceGap) {
      st.diverged = true;
      st.accept_prob = 0.0;
      return st;
    }
    st.accept_prob = delta < 0.0 ? 1.0 : std::exp(-delta);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng_) < st.accept_prob) {
      y_ = ph.y;
      grad_ = ph.grad;
      lp_ = ph.lp;
      st.accepted = true;
    }
    return st;
  }

  double find_reasonable_eps() {
    double eps = 1.0;
    Phase ph;
    for (int tries = 0; tries < 100; ++tries) {
      if (integrate(eps, 1, &ph)) break;
      eps *= 0.5;
      if (tries == 99) fail("InitFailed", "could not find a stable step size");
    }
    const double h1 = hamiltonian(ph.lp, ph.p);
    double accept = std::exp(h0_ - h1);
    const double dir = accept > 0.5 ? 1.0 : -1.0;
    for (int tries = 0; tries < 60; ++tries) {
      if (dir > 0 && accept <= 0.5) break;
      if (dir < 0 && accept >= 0.5) break;
      eps *= dir > 0 ? 2.0 : 0.5;
      if (!integrate(eps, 1, &ph)) {
        if (dir > 0) {
          eps *= 0.5;
          break;
        }
        continue;
      }
      double h = hamiltonian(ph.lp, ph.p);
      accept = std::exp(h0_ - h);
    }
    return eps;
  }

  void adapt() {
    if (cfg_.step_size) {
      eps_ = *cfg_.step_size;
      for (int w = 0; w < cfg_.warmup; ++w) transition();
      return;
    }
    const int warmup = cfg_.warmup;
    if (warmup <= 0) {
      eps_ = find_reasonable_eps();
      return;
    }
    const int tail = std::max(50, warmup / 20);
    const int half = warmup / 2;
    const bool staged = warmup >= 4 * tail;  // enough room for a metric window

    eps_ = find_reasonable_eps();
    DualAveraging da;
    da.restart(eps_, cfg_.target_accept);

    Vec mean = Vec::Zero(dim_), m2 = Vec::Zero(dim_);
    std::int64_t var_count = 0;
    const int metric_at = staged ? warmup - tail : warmup;

    for (int w = 0; w < warmup; ++w) {
      TransitionStats st = transition();
      da.update(st.accept_prob);
      eps_ = da.current();
      if (staged && w >= half && w < metric_at) {
        ++var_count;
        Vec delta = y_ - mean;
        mean += delta / static_cast<double>(var_count);
        m2 += delta.cwiseProduct(y_ - mean);
      }
      if (staged && w + 1 == metric_at && var_count > 10) {
        const double n = static_cast<double>(var_count);
        Vec var = m2 / (n - 1.0);
        // Shrink toward unit scale the way short windows need.
        inv_mass_ = ((n / (n + 5.0)) * var.array() + 1e-3 * (5.0 / (n + 5.0))).matrix();
        eps_ = find_reasonable_eps();
        da.restart(eps_, cfg_.target_accept);
      }
    }
    eps_ = da.averaged();
  }

  const LogpGrad& target_;
  int dim_;
  SamplerConfig cfg_;
  std::mt19937_64 rng_;
  Vec inv_mass_;
  Vec y_, grad_;
  double lp_ = 0.0;
  double eps_ = 1.0;
  double h0_ = 0.0;
};

}  // namespace

void SamplerConfig::check() const {
  if (chains < 1) fail("BadConfig", "need at least one chain");
  if (samples < 1) fail("BadConfig", "need at least one sample");
  if (warmup < 0) fail("BadConfig", "negative warmup");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    fail("BadConfig", "target acceptance must be in (0, 1)");
  if (max_leapfrog < 1) fail("BadConfig", "max leapfrog steps must be positive");
  if (trajectory_length <= 0.0) fail("BadConfig", "trajectory length must be positive");
  if (step_size && *step_size <= 0.0) fail("BadConfig", "step size must be positive");
}

int SampleResult::total_draws() const {
  int t = 0;
  for (const auto& c : chains) t += static_cast<int>(c.draws.rows());
  return t;
}

Mat SampleResult::stacked() const {
  Mat out(total_draws(), dim);
  int row = 0;
  for (const auto& c : chains) {
    out.middleRows(row, c.draws.rows()) = c.draws;
    row += static_cast<int>(c.draws.rows());
  }
  return out;
}

SampleResult run_sampler(const LogpGrad& target, int dim, const SamplerConfig& cfg,
                         const ChainInit& init) {
  cfg.check();
  if (dim < 1) fail("BadConfig", "dimension must be positive");
  SampleResult out;
  out.dim = dim;
  out.chains.resize(static_cast<std::size_t>(cfg.chains));

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.chains));
  auto work = [&](int c) {
    try {
      ChainRunner runner(target, dim, cfg, init, c);
      out.chains[static_cast<std::size_t>(c)] = runner.run();
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(cfg.chains));
  for (int c = 0; c < cfg.chains; ++c) threads.emplace_back(work, c);
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::int64_t divergent = 0, total = 0;
  for (const auto& c : out.chains) {
    divergent += c.divergences;
    total += c.draws.rows();
  }
  if (total > 0 && divergent * 2 > total)
    fail("AllDivergent", "more than half of all transitions diverged");
  return out;
}

}  // namespace simplexrank
