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

#include "simplexrank/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <utility>

#include "simplexrank/metrics.hpp"
#include "simplexrank/svg.hpp"

namespace simplexrank {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string flat(std::string text) {
  for (char& c : text)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return text;
}

SweepCell run_cell(const ScoreDataset& ds, double omega, double beta_max,
                   const SamplerConfig& cfg, bool self_adjust) {
  SweepCell cell;
  cell.omega = omega;
  cell.beta_max = beta_max;
  cell.spearman_vs_base = kNan;
  cell.mean_rank_ci_width = kNan;
  cell.mean_score_ci_width = kNan;
  cell.coverage = kNan;
  try {
    const Hyperparameters hyper = Hyperparameters::make(
        ds.rubric.true_levels, omega, beta_max, self_adjust);
    FitResult fit = fit_bayes(ds, hyper, cfg);
    cell.report = std::move(fit.report);
    cell.divergences = cell.report.divergences;
    double rank_width = 0.0, score_width = 0.0;
    for (const CandidateSummary& c : cell.report.candidates) {
      rank_width += static_cast<double>(c.rank_hi - c.rank_lo);
      score_width += c.score_hi - c.score_lo;
    }
    const double k = static_cast<double>(cell.report.candidates.size());
    cell.mean_rank_ci_width = rank_width / k;
    cell.mean_score_ci_width = score_width / k;
    cell.ok = true;
  } catch (const Error& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

const SweepCell* SweepReport::find(double omega, double beta_max) const {
  for (const SweepCell& cell : cells)
    if (cell.omega == omega && cell.beta_max == beta_max) return &cell;
  return nullptr;
}

std::string SweepReport::to_tsv() const {
  std::ostringstream out;
  out << "# schema=simplexrank/sweep v1\n";
  out << "# reference cell: omega=0 beta_max=0\n";
  out << "omega\tbeta_max\tstatus\tspearman_vs_base\tmean_rank_ci_width\t"
         "mean_score_ci_width\tcoverage\tdivergences\terror\n";
  for (const SweepCell& c : cells) {
    out << num(c.omega) << '\t' << num(c.beta_max) << '\t'
        << (c.ok ? "ok" : "error") << '\t' << num(c.spearman_vs_base) << '\t'
        << num(c.mean_rank_ci_width) << '\t' << num(c.mean_score_ci_width)
        << '\t' << num(c.coverage) << '\t' << c.divergences << '\t'
        << flat(c.error) << '\n';
  }
  return out.str();
}

SweepReport sensitivity_sweep(const ScoreDataset& ds,
                              const std::vector<double>& omegas,
                              const std::vector<double>& beta_maxes,
                              const SamplerConfig& cfg, const Ranking* truth,
                              bool self_adjust) {
  if (omegas.empty() || beta_maxes.empty())
    fail("BadConfig", "sweep grids must be nonempty");

  SweepReport report;
  report.omegas = omegas;
  report.beta_maxes = beta_maxes;

  report.base = run_cell(ds, 0.0, 0.0, cfg, self_adjust);
  if (report.base.ok) {
    report.base.spearman_vs_base = 1.0;
    if (truth)
      report.base.coverage = rank_coverage({&report.base.report}, *truth);
  }

  for (const double omega : omegas) {
    for (const double beta_max : beta_maxes) {
      if (omega == 0.0 && beta_max == 0.0) {
        report.cells.push_back(report.base);
        continue;
      }
      SweepCell cell = run_cell(ds, omega, beta_max, cfg, self_adjust);
      if (cell.ok && report.base.ok) {
        try {
          cell.spearman_vs_base =
              spearman(cell.report.ranking, report.base.report.ranking);
        } catch (const Error& e) {
          cell.ok = false;
          cell.error = e.what();
        }
      }
      if (cell.ok && truth)
        cell.coverage = rank_coverage({&cell.report}, *truth);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string sweep_scatter_svg(const SweepReport& report) {
  std::vector<ScatterSeries> series;
  for (std::size_t bi = 0; bi < report.beta_maxes.size(); ++bi) {
    ScatterSeries s;
    char label[48];
    std::snprintf(label, sizeof(label), "beta_max=%.6g", report.beta_maxes[bi]);
    s.label = label;
    for (std::size_t oi = 0; oi < report.omegas.size(); ++oi) {
      const SweepCell& cell = report.cells[oi * report.beta_maxes.size() + bi];
      s.x.push_back(cell.omega);
      s.y.push_back(cell.ok ? cell.spearman_vs_base : kNan);
    }
    series.push_back(std::move(s));
  }
  return svg_scatter_plot(series, "omega", "Spearman vs base",
                          "Ranking stability across random-effect weights");
}

}  // namespace simplexrank
