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

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simplexrank/baselines.hpp"
#include "simplexrank/counts.hpp"
#include "simplexrank/data_io.hpp"
#include "simplexrank/fit.hpp"
#include "simplexrank/geometry.hpp"
#include "simplexrank/judge_runner.hpp"
#include "simplexrank/metrics.hpp"
#include "simplexrank/prior.hpp"
#include "simplexrank/svg.hpp"
#include "simplexrank/sweep.hpp"

namespace {

using namespace simplexrank;
using nlohmann::ordered_json;

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      fail("BadConfig", std::string(what) + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail("BadConfig", std::string(what) + " is empty");
  return out;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Every run emits a TSV table plus a JSON summary next to it; with no --out
// the table goes to stdout.
void emit_report(const RankReport& report, const std::string& out) {
  if (out.empty()) {
    std::cout << report.to_tsv();
    return;
  }
  write_file_atomic(out + ".tsv", report.to_tsv());
  write_file_atomic(out + ".json", report.to_json());
}

ordered_json report_json(const RankReport& report) {
  return ordered_json::parse(report.to_json());
}

struct RankArgs {
  std::string input;
  double omega = 0.0, beta_max = 10.0;
  bool self_adjust = true, stratify = true;
  int chains = 4, warmup = 1000, samples = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_rank(const RankArgs& a) {
  ScoreDataset ds = load_dataset(a.input);
  if (!a.stratify)
    for (ScoreRecord& r : ds.records) r.stratum = "default";
  const Hyperparameters hyper = Hyperparameters::make(
      ds.rubric.true_levels, a.omega, a.beta_max, a.self_adjust);
  SamplerConfig cfg;
  cfg.chains = a.chains;
  cfg.warmup = a.warmup;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  const FitResult fit = fit_bayes(ds, hyper, cfg);
  if (fit.report.divergences > 0)
    std::cerr << "note: " << fit.report.divergences
              << " divergent transitions\n";
  emit_report(fit.report, a.out);
  return 0;
}

struct BaselineArgs {
  std::string method, input, out;
  int replicates = 0;  // 0 keeps the per-method default
  std::uint64_t seed = 0;
};

int cmd_baseline(const BaselineArgs& a) {
  const ScoreDataset ds = load_dataset(a.input);
  if (a.method == "average") {
    emit_report(simple_average(ds), a.out);
  } else if (a.method == "bootstrap") {
    emit_report(bootstrap_rank_ci(ds, a.replicates > 0 ? a.replicates : 1000,
                                  a.seed),
                a.out);
  } else if (a.method == "bt") {
    emit_report(bradley_terry_ties(ds, a.replicates > 0 ? a.replicates : 200,
                                   a.seed)
                    .report,
                a.out);
  } else if (a.method == "single") {
    const SingleJudgeResult res = single_judge(ds);
    std::ostringstream tsv;
    tsv << res.pooled.to_tsv();
    for (const auto& [judge, rep] : res.per_judge)
      tsv << "# judge=" << judge << "\n" << rep.to_tsv();
    if (a.out.empty()) {
      std::cout << tsv.str();
    } else {
      write_file_atomic(a.out + ".tsv", tsv.str());
      ordered_json j;
      j["schema"] = "simplexrank/single-judge";
      j["schema_version"] = 1;
      j["pooled"] = report_json(res.pooled);
      for (const auto& [judge, rep] : res.per_judge)
        j["per_judge"][judge] = report_json(rep);
      write_file_atomic(a.out + ".json", j.dump(2) + "\n");
    }
  } else {
    fail("BadConfig", "unknown baseline method '" + a.method +
                          "' (expected average|single|bootstrap|bt)");
  }
  return 0;
}

struct SweepArgs {
  std::string input, omega_grid = "0,1,2,4,8", beta_grid = "10";
  std::string truth_path, out;
  bool self_adjust = true;
  int chains = 4, warmup = 1000, samples = 1000;
  std::uint64_t seed = 0;
};

int cmd_sweep(const SweepArgs& a) {
  const ScoreDataset ds = load_dataset(a.input);
  const std::vector<double> omegas = parse_grid(a.omega_grid, "--omega-grid");
  const std::vector<double> betas = parse_grid(a.beta_grid, "--beta-grid");
  SamplerConfig cfg;
  cfg.chains = a.chains;
  cfg.warmup = a.warmup;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  std::optional<SyntheticTruth> truth;
  if (!a.truth_path.empty())
    truth = parse_truth_json(read_file_maybe_gz(a.truth_path));
  const SweepReport report = sensitivity_sweep(
      ds, omegas, betas, cfg, truth ? &truth->ranking : nullptr,
      a.self_adjust);
  if (a.out.empty()) {
    std::cout << report.to_tsv();
    return 0;
  }
  write_file_atomic(a.out + ".tsv", report.to_tsv());
  write_file_atomic(a.out + ".svg", sweep_scatter_svg(report));
  ordered_json j;
  j["schema"] = "simplexrank/sweep";
  j["schema_version"] = 1;
  auto cell_json = [](const SweepCell& c) {
    ordered_json o;
    o["omega"] = c.omega;
    o["beta_max"] = c.beta_max;
    o["ok"] = c.ok;
    if (!c.ok) o["error"] = c.error;
    o["spearman_vs_base"] = c.spearman_vs_base;
    o["mean_rank_ci_width"] = c.mean_rank_ci_width;
    o["mean_score_ci_width"] = c.mean_score_ci_width;
    o["coverage"] = c.coverage;
    o["divergences"] = c.divergences;
    if (c.ok) o["report"] = report_json(c.report);
    return o;
  };
  j["base"] = cell_json(report.base);
  j["cells"] = ordered_json::array();
  for (const SweepCell& c : report.cells) j["cells"].push_back(cell_json(c));
  write_file_atomic(a.out + ".json", j.dump(2) + "\n");
  return 0;
}

struct SimulateArgs {
  int true_levels = 2, assigned_levels = 0;
  int candidates = 6, judges = 2, questions = 500, strata = 1;
  double correlation = 0.0, shift_weight = 0.0, judge_quality = 25.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.out.empty()) fail("BadConfig", "--out is required for simulate");
  const int assigned = a.assigned_levels > 0 ? a.assigned_levels : a.true_levels;
  const RubricSpec rubric = RubricSpec::make(a.true_levels, assigned);

  SyntheticSpec sp;
  sp.rubric = rubric;
  sp.seed = a.seed;
  sp.correlation = a.correlation;
  sp.judge_shift_weight = a.shift_weight;
  sp.questions_per_stratum = a.questions;
  if (a.strata > 1) {
    sp.strata.clear();
    for (int s = 0; s < a.strata; ++s) {
      char name[16];
      std::snprintf(name, sizeof(name), "s%02d", s + 1);
      sp.strata.push_back(name);
    }
  }
  // Candidate prevalences and judge vertices are drawn from their priors on
  // a stream separate from the data stream.
  std::mt19937_64 prng = make_rng(a.seed, 0xd1ceULL);
  for (int k = 0; k < a.candidates; ++k) {
    char id[16];
    std::snprintf(id, sizeof(id), "c%02d", k + 1);
    sp.candidate_ids.push_back(id);
    sp.prevalences.push_back(
        sample_dirichlet(Vec::Ones(a.true_levels), prng));
  }
  const Hyperparameters vertex_prior =
      Hyperparameters::make(a.true_levels, 0.0, a.judge_quality, true);
  const JudgePriorParams params =
      sample_judge_vertices(rubric, vertex_prior, a.judges, prng);
  for (int j = 0; j < a.judges; ++j) {
    char id[16];
    std::snprintf(id, sizeof(id), "j%02d", j + 1);
    sp.judge_ids.push_back(id);
    sp.vertices.push_back(
        assemble_vertices(params.judges[j], a.true_levels, assigned));
  }

  SyntheticTruth truth;
  const ScoreDataset ds = generate_synthetic(sp, &truth);
  save_dataset(ds, a.out + ".jsonl");
  write_file_atomic(a.out + ".truth.json", write_truth_json(truth));
  std::cerr << "wrote " << a.out << ".jsonl and " << a.out << ".truth.json\n";
  return 0;
}

struct IdentifyArgs {
  std::string input, truth_path, plot_path, out;
  bool witness = false;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
};

ordered_json mat_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

int cmd_identify(const IdentifyArgs& a) {
  if (a.witness) {
    // Random interior three-level configuration; columns biased toward the
    // diagonal so they are clearly distinct but strictly interior.
    std::mt19937_64 rng = make_rng(a.seed, 0x317ULL);
    Mat base(3, 3);
    for (int c = 0; c < 3; ++c) {
      Vec conc = Vec::Ones(3);
      conc[c] = 4.0;
      base.col(c) = sample_dirichlet(conc, rng);
    }
    Vec values(3);
    values << 1, 2, 3;
    const NonidentifiabilityWitness w =
        make_nonidentifiability_witness(base, a.epsilon, values);
    ordered_json j;
    j["schema"] = "simplexrank/witness";
    j["schema_version"] = 1;
    j["base_vertices"] = mat_json(w.base_vertices);
    j["perturbation"] = mat_json(w.perturbation);
    j["step"] = w.step;
    j["epsilon"] = w.epsilon;
    j["prevalence_pair"] = mat_json(w.prevalence_pair);
    j["shared_marginals"] = mat_json(w.shared_marginals);
    j["scores_plus"] = {w.scores_plus[0], w.scores_plus[1]};
    j["scores_minus"] = {w.scores_minus[0], w.scores_minus[1]};
    const std::string text = j.dump(2) + "\n";
    if (a.out.empty()) std::cout << text;
    else write_file_atomic(a.out + ".json", text);
    return 0;
  }

  if (a.input.empty())
    fail("BadConfig", "identify needs a dataset (or --witness)");
  const ScoreDataset ds = load_dataset(a.input);
  const std::map<std::string, Vec> pooled = pooled_marginals(ds);
  std::optional<SyntheticTruth> truth;
  if (!a.truth_path.empty())
    truth = parse_truth_json(read_file_maybe_gz(a.truth_path));

  std::ostringstream tsv;
  if (ds.rubric.true_levels == 2) {
    const Ranking ranking = rank_binary_strong(pooled, ds.rubric);
    tsv << "# method=binary-strong\ncandidate\trank\ttop_level_share\n";
    const std::map<std::string, int> ranks = ranking.competition_ranks();
    for (const std::string& id : ranking.order)
      tsv << id << '\t' << ranks.at(id) << '\t'
          << pooled.at(id)[ds.rubric.assigned_levels - 1] << '\n';
  } else {
    tsv << "# method=pooled-marginals\ncandidate";
    for (int l = 1; l <= ds.rubric.assigned_levels; ++l) tsv << "\tlevel" << l;
    tsv << '\n';
    for (const auto& [id, marg] : pooled) {
      tsv << id;
      for (Eigen::Index l = 0; l < marg.size(); ++l) tsv << '\t' << marg[l];
      tsv << '\n';
    }
  }

  if (truth) {
    const auto by_judge = empirical_marginals(ds);
    tsv << "# envelope check against supplied vertices\n";
    tsv << "judge\tfeasible\tviolators\n";
    for (std::size_t j = 0; j < truth->judge_ids.size(); ++j) {
      const auto it = by_judge.find(truth->judge_ids[j]);
      if (it == by_judge.end()) continue;
      std::vector<std::string> violators;
      // Empirical frequencies carry sampling noise; a loose tolerance keeps
      // the check about geometry rather than noise.
      const bool ok =
          envelope_feasible(it->second, truth->vertices[j], 0.05, &violators);
      tsv << truth->judge_ids[j] << '\t' << (ok ? "yes" : "no") << '\t';
      for (std::size_t v = 0; v < violators.size(); ++v)
        tsv << (v ? "," : "") << violators[v];
      tsv << '\n';
    }
  }

  if (!a.plot_path.empty()) {
    if (ds.rubric.assigned_levels != 3)
      fail("BadConfig", "simplex plot needs exactly 3 assigned levels");
    std::vector<SimplexSeries> series;
    SimplexSeries cands;
    cands.label = "candidates";
    for (const auto& [id, marg] : pooled) cands.points.push_back(marg);
    series.push_back(std::move(cands));
    if (truth) {
      SimplexSeries verts;
      verts.label = "judge vertices";
      for (const Mat& v : truth->vertices)
        for (Eigen::Index c = 0; c < v.cols(); ++c)
          verts.points.push_back(v.col(c));
      series.push_back(std::move(verts));
    }
    write_file_atomic(a.plot_path,
                      svg_simplex_plot(series, {"level1", "level2", "level3"},
                                       "Score marginals"));
  }

  if (a.out.empty()) std::cout << tsv.str();
  else write_file_atomic(a.out + ".tsv", tsv.str());
  return 0;
}

struct JudgeArgs {
  std::string questions_path, task, judges, out;
  std::string mock_path, checkpoint;
  int true_levels = 0, assigned_levels = 0;
  int concurrency = 4, retries = 3;
  double backoff_ms = 250.0;
  std::uint64_t seed = 0;
};

std::vector<JudgeQuestion> load_questions(const std::string& path) {
  const ordered_json j = ordered_json::parse(read_file_maybe_gz(path), nullptr,
                                             false);
  if (j.is_discarded() || !j.is_array())
    fail("BadFormat", "questions file must be a JSON array: " + path);
  std::vector<JudgeQuestion> out;
  for (const ordered_json& q : j) {
    JudgeQuestion question;
    question.question_id = q.at("question_id").get<std::string>();
    if (q.contains("stratum")) question.stratum = q["stratum"].get<std::string>();
    question.text = q.at("text").get<std::string>();
    if (q.contains("reference_answer"))
      question.reference_answer = q["reference_answer"].get<std::string>();
    for (const ordered_json& c : q.at("candidates")) {
      CandidateAnswer cand;
      cand.candidate_id = c.at("candidate_id").get<std::string>();
      cand.answer = c.at("answer").get<std::string>();
      if (c.contains("explanation"))
        cand.explanation = c["explanation"].get<std::string>();
      question.candidates.push_back(std::move(cand));
    }
    out.push_back(std::move(question));
  }
  return out;
}

// Canned responses for offline runs: {"judge or *": {"question_id or *":
// "response"}}. The question is recovered by matching its text inside the
// rendered prompt.
class MockFileTransport : public Transport {
 public:
  MockFileTransport(const std::string& path,
                    const std::vector<JudgeQuestion>& questions)
      : questions_(questions) {
    responses_ = ordered_json::parse(read_file_maybe_gz(path), nullptr, false);
    if (responses_.is_discarded() || !responses_.is_object())
      fail("BadFormat", "mock file must be a JSON object: " + path);
  }

  std::string complete(const std::string& model,
                       const std::string& prompt) override {
    const JudgeQuestion* match = nullptr;
    for (const JudgeQuestion& q : questions_)
      if (!q.text.empty() && prompt.find(q.text) != std::string::npos) {
        match = &q;
        break;
      }
    const std::string qid = match ? match->question_id : "*";
    for (const std::string& jk : {model, std::string("*")}) {
      if (!responses_.contains(jk)) continue;
      const ordered_json& per = responses_[jk];
      if (!per.is_object()) continue;
      for (const std::string& qk : {qid, std::string("*")})
        if (per.contains(qk)) return per[qk].get<std::string>();
    }
    fail("BadRequest",
         "no canned response for judge " + model + " question " + qid);
  }

 private:
  const std::vector<JudgeQuestion>& questions_;
  ordered_json responses_;
};

int cmd_judge(const JudgeArgs& a) {
  if (a.out.empty()) fail("BadConfig", "--out is required for judge");
  const TaskKind kind = task_kind_from_string(a.task);
  const bool accuracy = kind == TaskKind::kBinaryVerification ||
                        kind == TaskKind::kMathNoRef ||
                        kind == TaskKind::kMathWithRef;
  int true_levels = a.true_levels;
  if (true_levels == 0) {
    if (kind == TaskKind::kBinaryVerification) true_levels = 2;
    else if (accuracy) true_levels = 3;
    else true_levels = 5;
  }
  const int assigned =
      a.assigned_levels > 0 ? a.assigned_levels : (accuracy ? 3 : 5);

  JudgeRunConfig cfg;
  cfg.kind = kind;
  cfg.rubric = RubricSpec::make(true_levels, assigned);
  cfg.judge_ids = split_ids(a.judges);
  cfg.concurrency = a.concurrency;
  cfg.max_retries = a.retries;
  cfg.backoff_initial_ms = a.backoff_ms;
  cfg.seed = a.seed;
  cfg.checkpoint_path = a.checkpoint;

  const std::vector<JudgeQuestion> questions = load_questions(a.questions_path);
  std::unique_ptr<Transport> transport;
  if (!a.mock_path.empty())
    transport = std::make_unique<MockFileTransport>(a.mock_path, questions);
  else
    transport = make_http_transport(endpoint_from_env());

  const ScoreDataset ds = run_judging(*transport, questions, cfg);
  save_dataset(ds, a.out);
  std::cerr << "wrote " << ds.records.size() << " records to " << a.out
            << "\n";
  return 0;
}

struct EvalArgs {
  std::vector<std::string> reports;
  std::string truth_path, out;
};

int cmd_eval(const EvalArgs& a) {
  const SyntheticTruth truth =
      parse_truth_json(read_file_maybe_gz(a.truth_path));
  std::vector<RankReport> reports;
  for (const std::string& path : a.reports)
    reports.push_back(RankReport::from_json(read_file_maybe_gz(path)));

  std::ostringstream tsv;
  tsv << "report\tmethod\tspearman\trank_coverage\n";
  double corr_sum = 0.0;
  std::vector<const RankReport*> all;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double corr = spearman(reports[i].ranking, truth.ranking);
    const double cov = rank_coverage({&reports[i]}, truth.ranking);
    corr_sum += corr;
    all.push_back(&reports[i]);
    char line[64];
    std::snprintf(line, sizeof(line), "%.6f\t%.6f", corr, cov);
    tsv << a.reports[i] << '\t' << reports[i].method << '\t' << line << '\n';
  }
  char summary[128];
  std::snprintf(summary, sizeof(summary),
                "# mean_spearman=%.6f\n# overall_coverage=%.6f\n",
                corr_sum / static_cast<double>(reports.size()),
                rank_coverage(all, truth.ranking));
  tsv << summary;
  if (a.out.empty()) std::cout << tsv.str();
  else write_file_atomic(a.out + ".tsv", tsv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Judge-score ranking toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  RankArgs rank_args;
  CLI::App* rank = app.add_subcommand(
      "rank", "Fit the Bayesian ranking model on a dataset");
  rank->add_option("input", rank_args.input, "dataset (.jsonl/.tsv, maybe .gz)")
      ->required();
  rank->add_option("--omega", rank_args.omega, "random-effect strength");
  rank->add_option("--beta-max", rank_args.beta_max,
                   "judge prior diagonal boost scale");
  rank->add_flag("--self-adjust,!--no-self-adjust", rank_args.self_adjust,
                 "drop same-family judge/candidate records");
  rank->add_option("--chains", rank_args.chains, "MCMC chains");
  rank->add_option("--warmup", rank_args.warmup, "warmup iterations");
  rank->add_option("--samples", rank_args.samples, "sampling iterations");
  rank->add_option("--seed", rank_args.seed, "RNG seed");
  rank->add_flag("--stratify,!--no-stratify", rank_args.stratify,
                 "fit each stratum separately (default on)");
  rank->add_option("--out", rank_args.out, "output base path (.tsv + .json)");
  rank->callback([&] { action = [&] { return cmd_rank(rank_args); }; });

  BaselineArgs base_args;
  CLI::App* baseline =
      app.add_subcommand("baseline", "Run a non-Bayesian ranking baseline");
  baseline->add_option("method", base_args.method,
                       "average | single | bootstrap | bt")
      ->required();
  baseline->add_option("input", base_args.input, "dataset path")->required();
  baseline->add_option("--replicates", base_args.replicates,
                       "bootstrap replicates (default 1000, bt 200)");
  baseline->add_option("--seed", base_args.seed, "RNG seed");
  baseline->add_option("--out", base_args.out, "output base path");
  baseline->callback([&] { action = [&] { return cmd_baseline(base_args); }; });

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Hyperparameter sensitivity sweep over omega and beta_max");
  sweep->add_option("input", sweep_args.input, "dataset path")->required();
  sweep->add_option("--omega-grid", sweep_args.omega_grid,
                    "comma-separated omega grid (default 0,1,2,4,8)");
  sweep->add_option("--beta-grid", sweep_args.beta_grid,
                    "comma-separated beta_max grid (default 10)");
  sweep->add_option("--truth", sweep_args.truth_path,
                    "truth file for coverage columns");
  sweep->add_flag("--self-adjust,!--no-self-adjust", sweep_args.self_adjust,
                  "drop same-family judge/candidate records");
  sweep->add_option("--chains", sweep_args.chains, "MCMC chains");
  sweep->add_option("--warmup", sweep_args.warmup, "warmup iterations");
  sweep->add_option("--samples", sweep_args.samples, "sampling iterations");
  sweep->add_option("--seed", sweep_args.seed, "RNG seed");
  sweep->add_option("--out", sweep_args.out,
                    "output base path (.tsv + .json + .svg)");
  sweep->callback([&] { action = [&] { return cmd_sweep(sweep_args); }; });

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a synthetic dataset with ground truth");
  sim->add_option("--true-levels", sim_args.true_levels, "latent levels M");
  sim->add_option("--assigned-levels", sim_args.assigned_levels,
                  "score levels (default M)");
  sim->add_option("--candidates", sim_args.candidates, "candidate count");
  sim->add_option("--judges", sim_args.judges, "judge count");
  sim->add_option("--questions", sim_args.questions, "questions per stratum");
  sim->add_option("--strata", sim_args.strata, "stratum count");
  sim->add_option("--correlation", sim_args.correlation,
                  "within-question judge correlation in [0,1]");
  sim->add_option("--shift-weight", sim_args.shift_weight,
                  "per-judge prevalence shift weight in [0,1]");
  sim->add_option("--judge-quality", sim_args.judge_quality,
                  "diagonal boost used when drawing judge vertices");
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_option("--out", sim_args.out,
                  "output base path (.jsonl + .truth.json)")
      ->required();
  sim->callback([&] { action = [&] { return cmd_simulate(sim_args); }; });

  IdentifyArgs id_args;
  CLI::App* identify = app.add_subcommand(
      "identify", "Geometry tools: marginal ranking, envelope, witness");
  identify->add_option("input", id_args.input, "dataset path");
  identify->add_option("--truth", id_args.truth_path,
                       "truth file with judge vertices for envelope checks");
  identify->add_option("--plot", id_args.plot_path,
                       "write a simplex scatter SVG here");
  identify->add_flag("--witness", id_args.witness,
                     "emit a non-identifiability certificate instead");
  identify->add_option("--epsilon", id_args.epsilon,
                       "witness prevalence separation");
  identify->add_option("--seed", id_args.seed, "RNG seed");
  identify->add_option("--out", id_args.out, "output base path");
  identify->callback([&] { action = [&] { return cmd_identify(id_args); }; });

  JudgeArgs judge_args;
  CLI::App* judge = app.add_subcommand(
      "judge", "Collect judge scores through a chat-completion endpoint");
  judge->add_option("--questions", judge_args.questions_path,
                    "JSON questions file")
      ->required();
  judge->add_option("--task", judge_args.task,
                    "binary-verification | mtbench-style | tldr-style | "
                    "math-no-ref | math-with-ref")
      ->required();
  judge->add_option("--judges", judge_args.judges,
                    "comma-separated judge model names")
      ->required();
  judge->add_option("--true-levels", judge_args.true_levels,
                    "override latent level count");
  judge->add_option("--assigned-levels", judge_args.assigned_levels,
                    "override assigned level count");
  judge->add_option("--mock", judge_args.mock_path,
                    "canned responses JSON (offline mode)");
  judge->add_option("--checkpoint", judge_args.checkpoint,
                    "JSONL audit/checkpoint file; reruns resume");
  judge->add_option("--concurrency", judge_args.concurrency,
                    "max in-flight requests");
  judge->add_option("--retries", judge_args.retries, "retries per request");
  judge->add_option("--backoff-ms", judge_args.backoff_ms,
                    "initial retry backoff (doubles)");
  judge->add_option("--seed", judge_args.seed,
                    "seed for candidate order shuffling");
  judge->add_option("--out", judge_args.out, "output dataset path")
      ->required();
  judge->callback([&] { action = [&] { return cmd_judge(judge_args); }; });

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score report files against a truth file");
  eval->add_option("reports", eval_args.reports, "report JSON files")
      ->required();
  eval->add_option("--truth", eval_args.truth_path, "truth JSON file")
      ->required();
  eval->add_option("--out", eval_args.out, "output base path");
  eval->callback([&] { action = [&] { return cmd_eval(eval_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return action();
  } catch (const Error& e) {
    ordered_json err{{"error", e.code()}, {"message", std::string(e.what())}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ordered_json err{{"error", "Internal"}, {"message", std::string(e.what())}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
