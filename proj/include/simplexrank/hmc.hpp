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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "simplexrank/common.hpp"

namespace simplexrank {

struct SamplerConfig {
  int chains = 4;
  int warmup = 1000;
  int samples = 1000;
  double target_accept = 0.8;
  int max_leapfrog = 1024;
  std::uint64_t seed = 0;
  // Nominal integration time; actual trajectories jitter around it.
  double trajectory_length = 1.5;
  // Skips step-size adaptation when set.
  std::optional<double> step_size;

  void check() const;
};

struct ChainResult {
  Mat draws;  // one row per post-warmup draw
  Vec logp;
  int divergences = 0;  // post-warmup only
  double step_size = 0.0;
  Vec inv_mass;
  double accept_rate = 0.0;
};

struct SampleResult {
  std::vector<ChainResult> chains;
  int dim = 0;

  int total_draws() const;
  // Chains stacked in chain order; rows are draws.
  Mat stacked() const;
};

using LogpGrad = std::function<double(const Vec&, Vec*)>;
using ChainInit = std::function<Vec(std::mt19937_64&)>;

// Fixed-length-trajectory HMC with dual-averaging step-size adaptation and a
// diagonal metric estimated from the second half of warmup.  Chains draw from
// independent counter-based streams of the seed, so results are reproducible
// bit for bit regardless of scheduling.  Raises AllDivergent when more than
// half of all post-warmup transitions diverge.
SampleResult run_sampler(const LogpGrad& target, int dim, const SamplerConfig& cfg,
                         const ChainInit& init = nullptr);

}  // namespace simplexrank
