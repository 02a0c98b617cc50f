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

#include "simplexrank/fit.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "simplexrank/common.hpp"

namespace simplexrank {

namespace {

// Distinct, reproducible sub-seed per stratum. Strata are iterated in sorted
// order, so the index is stable for a given dataset.
std::uint64_t stratum_seed(std::uint64_t base, std::size_t index) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace

PosteriorDraws run_sampler(const SufficientCounts& counts,
                           const Hyperparameters& hyper,
                           const SamplerConfig& cfg, const ModelOptions& opts) {
  cfg.check();
  hyper.check(counts.rubric.true_levels);
  if (counts.strata.empty()) fail("EmptyDataset", "no strata to fit");

  PosteriorDraws out;
  out.candidate_ids = counts.all_candidates();
  out.strata.reserve(counts.strata.size());

  for (std::size_t si = 0; si < counts.strata.size(); ++si) {
    const StratumCounts& sc = counts.strata[si];
    PosteriorModel model(sc, counts.rubric, hyper, opts);

    SamplerConfig local = cfg;
    local.seed = stratum_seed(cfg.seed, si);
    const LogpGrad logp = [&model](const Vec& y, Vec* g) {
      return model.logp_grad(y, g);
    };
    const ChainInit init = [&model](std::mt19937_64& rng) {
      return model.pack(model.sample_prior_state(rng));
    };

    StratumDraws sd;
    sd.stratum = sc.stratum;
    sd.candidate_ids = sc.candidate_ids;
    sd.weight = sc.question_count > 0 ? static_cast<double>(sc.question_count) : 1.0;
    sd.sample = run_sampler(logp, model.dim(), local, init);

    const int k = model.num_candidates();
    const int m = static_cast<int>(counts.rubric.true_levels);
    sd.mean_prevalences = Mat::Zero(k, m);
    std::int64_t total_draws = 0;
    for (const ChainResult& chain : sd.sample.chains) {
      const int s = static_cast<int>(chain.draws.rows());
      Mat scores(s, k), ranks(s, k);
      for (int d = 0; d < s; ++d) {
        const ModelState state = model.unpack(chain.draws.row(d).transpose());
        const Vec sv = model.scores(state);
        scores.row(d) = sv.transpose();
        std::vector<double> raw(sv.data(), sv.data() + k);
        const std::vector<int> rr = min_ranks(raw);
        for (int c = 0; c < k; ++c) {
          ranks(d, c) = static_cast<double>(rr[c]);
          sd.mean_prevalences.row(c) += state.prevalences[c].transpose();
        }
      }
      total_draws += s;
      sd.scores.push_back(std::move(scores));
      sd.ranks.push_back(std::move(ranks));
      out.divergences += chain.divergences;
    }
    if (total_draws > 0) sd.mean_prevalences /= static_cast<double>(total_draws);
    out.strata.push_back(std::move(sd));
  }

  // Question-weighted pooling, aligned draw by draw. All strata share the
  // sampler configuration, so chain and draw counts line up.
  const int kg = static_cast<int>(out.candidate_ids.size());
  const int chains = static_cast<int>(out.strata.front().scores.size());
  for (int c = 0; c < chains; ++c) {
    const int s = static_cast<int>(out.strata.front().scores[c].rows());
    Mat pooled = Mat::Zero(s, kg);
    Vec wsum = Vec::Zero(kg);
    for (const StratumDraws& sd : out.strata) {
      for (std::size_t kl = 0; kl < sd.candidate_ids.size(); ++kl) {
        const auto it = std::lower_bound(out.candidate_ids.begin(),
                                         out.candidate_ids.end(),
                                         sd.candidate_ids[kl]);
        const int g = static_cast<int>(it - out.candidate_ids.begin());
        pooled.col(g) += sd.weight * sd.scores[c].col(static_cast<int>(kl));
        wsum[g] += sd.weight;
      }
    }
    for (int g = 0; g < kg; ++g) pooled.col(g) /= wsum[g];
    out.pooled_scores.push_back(std::move(pooled));
  }
  return out;
}

RankReport summarize_ranks(const PosteriorDraws& draws) {
  RankReport report = summarize_ranks(draws.candidate_ids, draws.pooled_scores,
                                      draws.pooled_scores.size() >= 2);
  report.method = "bayes";
  report.divergences = draws.divergences;
  return report;
}

FitResult fit_bayes(const ScoreDataset& ds, const Hyperparameters& hyper,
                    const SamplerConfig& cfg, const ModelOptions& opts) {
  const SufficientCounts counts = tabulate(ds, hyper.self_adjust);
  FitResult result;
  result.draws = run_sampler(counts, hyper, cfg, opts);
  result.report = summarize_ranks(result.draws);
  return result;
}

}  // namespace simplexrank
