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

#include "simplexrank/posterior.hpp"

#include <cmath>
#include <limits>

#include "simplexrank/transforms.hpp"

namespace simplexrank {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Observed-data log likelihood with optional gradient accumulation.  Gradients
// are with respect to the constrained quantities; the caller pulls them back
// through the coordinate transform.  Returns -inf when a positive count meets
// a zero mixture mass.
double accumulate_ll(const StratumCounts& sc, const std::vector<Mat>& theta,
                     const std::vector<Vec>& prevs, const RandomEffects& re,
                     std::vector<Mat>* gtheta, std::vector<Vec>* gpi,
                     std::vector<Vec>* gz, Vec* gw, Vec* gr) {
  const int num_judges = static_cast<int>(sc.judge_ids.size());
  const int num_cands = static_cast<int>(sc.candidate_ids.size());
  const bool re_active = re.active();
  KahanSum lp;
  for (int j = 0; j < num_judges; ++j) {
    const Mat& th = theta[static_cast<std::size_t>(j)];
    const CountMat& n = sc.n[static_cast<std::size_t>(j)];
    const int mp = static_cast<int>(th.rows());
    for (int k = 0; k < num_cands; ++k) {
      if (n.row(k).sum() == 0) continue;
      double s = re_active ? re.w[k] * re.r[j] : 0.0;
      Vec mixed = re_active ? Vec((1.0 - s) * prevs[static_cast<std::size_t>(k)] +
                                  s * re.z[static_cast<std::size_t>(k)])
                            : prevs[static_cast<std::size_t>(k)];
      Vec gamma = th * mixed;
      Vec ggamma = Vec::Zero(mp);
      for (int l = 0; l < mp; ++l) {
        const std::int64_t c = n(k, l);
        if (c == 0) continue;
        if (!(gamma[l] > 0.0)) return kNegInf;
        lp.add(static_cast<double>(c) * std::log(gamma[l]));
        ggamma[l] = static_cast<double>(c) / gamma[l];
      }
      if (gtheta) {
        (*gtheta)[static_cast<std::size_t>(j)].noalias() +=
            ggamma * mixed.transpose();
        Vec gmixed = th.transpose() * ggamma;
        if (re_active) {
          (*gpi)[static_cast<std::size_t>(k)] += (1.0 - s) * gmixed;
          (*gz)[static_cast<std::size_t>(k)] += s * gmixed;
          double gs = gmixed.dot(re.z[static_cast<std::size_t>(k)] -
                                 prevs[static_cast<std::size_t>(k)]);
          (*gw)[k] += gs * re.r[j];
          (*gr)[j] += gs * re.w[k];
        } else {
          (*gpi)[static_cast<std::size_t>(k)] += gmixed;
        }
      }
    }
  }
  return lp.value();
}

void backprop_assembly(const JudgeTransitionParams& p, const Mat& theta,
                       Mat& gtheta, Vec& groot,
                       std::vector<std::vector<Vec>>& gnodes) {
  const int m = static_cast<int>(theta.cols());
  const int mp = static_cast<int>(theta.rows());
  for (int t = m - 1; t >= 1; --t) {
    Vec gcol = gtheta.col(t);
    for (int l = 0; l < mp; ++l) {
      if (l == mp - 1) {
        gtheta(mp - 1, t - 1) += gcol[mp - 1];
        continue;
      }
      const double mass = theta(l, t - 1);
      const Vec& w = p.nodes[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(l)];
      double acc = 0.0;
      for (int tgt = l; tgt < mp; ++tgt) {
        gnodes[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(l)][tgt - l] +=
            mass * gcol[tgt];
        acc += w[tgt - l] * gcol[tgt];
      }
      gtheta(l, t - 1) += acc;
    }
  }
  groot += gtheta.col(0);
}

}  // namespace

PosteriorModel::PosteriorModel(StratumCounts counts, RubricSpec rubric,
                               Hyperparameters hyper, ModelOptions opts)
    : counts_(std::move(counts)),
      rubric_(std::move(rubric)),
      hyper_(std::move(hyper)),
      opts_(std::move(opts)) {
  rubric_.check();
  hyper_.check(rubric_.true_levels);
  if (counts_.candidate_ids.empty() || counts_.judge_ids.empty())
    fail("EmptyDataset", "stratum has no counts");
  const int m = rubric_.true_levels;
  const int mp = rubric_.assigned_levels;
  const int num_cands = num_candidates();
  const int num_judges_n = num_judges();
  if (opts_.fixed_vertices) {
    if (static_cast<int>(opts_.fixed_vertices->size()) != num_judges_n)
      fail("BadDimension", "fixed vertex list does not match judge count");
    for (const auto& v : *opts_.fixed_vertices)
      if (v.columns.rows() != mp || v.columns.cols() != m)
        fail("BadDimension", "fixed vertex shape mismatch");
  }
  dim_ = num_cands * (m - 1);
  if (!opts_.fixed_vertices) {
    judge_block_dim_ = 1 + (mp - 1) + (m - 1) * (mp * (mp - 1)) / 2;
    dim_ += num_judges_n * judge_block_dim_;
  }
  if (hyper_.omega > 0.0) dim_ += num_cands * (m - 1) + num_cands + num_judges_n;
}

Vec PosteriorModel::pack(const ModelState& state) const {
  const int m = rubric_.true_levels;
  const int mp = rubric_.assigned_levels;
  const int num_cands = num_candidates();
  const int num_judges_n = num_judges();
  if (static_cast<int>(state.prevalences.size()) != num_cands)
    fail("BadDimension", "prevalence count mismatch");
  Vec y(dim_);
  int c = 0;
  for (const auto& pi : state.prevalences) {
    y.segment(c, m - 1) = unconstrained_from_simplex<double>(pi);
    c += m - 1;
  }
  if (!opts_.fixed_vertices) {
    if (static_cast<int>(state.judge_params.judges.size()) != num_judges_n)
      fail("BadDimension", "judge parameter count mismatch");
    for (const auto& judge : state.judge_params.judges) {
      y[c++] = unconstrained_from_unit(judge.rho);
      y.segment(c, mp - 1) = unconstrained_from_simplex<double>(judge.root);
      c += mp - 1;
      for (int t = 0; t + 1 < m; ++t) {
        for (int l = 0; l + 1 < mp; ++l) {
          const Vec& w = judge.nodes[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)];
          y.segment(c, mp - 1 - l) = unconstrained_from_simplex<double>(w);
          c += mp - 1 - l;
        }
      }
    }
  }
  if (hyper_.omega > 0.0) {
    if (!state.re.active()) fail("BadDimension", "random effects missing");
    for (int k = 0; k < num_cands; ++k) {
      y.segment(c, m - 1) =
          unconstrained_from_simplex<double>(state.re.z[static_cast<std::size_t>(k)]);
      c += m - 1;
    }
    for (int k = 0; k < num_cands; ++k) y[c++] = unconstrained_from_unit(state.re.w[k]);
    for (int j = 0; j < num_judges_n; ++j)
      y[c++] = unconstrained_from_unit(state.re.r[j]);
  }
  return y;
}

ModelState PosteriorModel::unpack(const Vec& y, double* log_jacobian) const {
  if (y.size() != dim_) fail("BadDimension", "state vector length mismatch");
  const int m = rubric_.true_levels;
  const int mp = rubric_.assigned_levels;
  const int num_cands = num_candidates();
  const int num_judges_n = num_judges();
  double lj = 0.0;
  int c = 0;
  ModelState st;
  st.prevalences.reserve(static_cast<std::size_t>(num_cands));
  for (int k = 0; k < num_cands; ++k) {
    Vec seg = y.segment(c, m - 1);
    double t = 0.0;
    st.prevalences.push_back(simplex_from_unconstrained<double>(seg, &t));
    lj += t;
    c += m - 1;
  }
  if (!opts_.fixed_vertices) {
    st.judge_params.judges.resize(static_cast<std::size_t>(num_judges_n));
    for (auto& judge : st.judge_params.judges) {
      double t = 0.0;
      judge.rho = unit_from_unconstrained(y[c++], &t);
      lj += t;
      Vec seg = y.segment(c, mp - 1);
      judge.root = simplex_from_unconstrained<double>(seg, &t);
      lj += t;
      c += mp - 1;
      judge.nodes.assign(static_cast<std::size_t>(m - 1), {});
      for (int tt = 0; tt + 1 < m; ++tt) {
        auto& row = judge.nodes[static_cast<std::size_t>(tt)];
        row.reserve(static_cast<std::size_t>(mp - 1));
        for (int l = 0; l + 1 < mp; ++l) {
          Vec nseg = y.segment(c, mp - 1 - l);
          row.push_back(simplex_from_unconstrained<double>(nseg, &t));
          lj += t;
          c += mp - 1 - l;
        }
      }
    }
  }
  if (hyper_.omega > 0.0) {
    st.re.z.reserve(static_cast<std::size_t>(num_cands));
    st.re.w.resize(num_cands);
    st.re.r.resize(num_judges_n);
    double t = 0.0;
    for (int k = 0; k < num_cands; ++k) {
      Vec seg = y.segment(c, m - 1);
      st.re.z.push_back(simplex_from_unconstrained<double>(seg, &t));
      lj += t;
      c += m - 1;
    }
    for (int k = 0; k < num_cands; ++k) {
      st.re.w[k] = unit_from_unconstrained(y[c++], &t);
      lj += t;
    }
    for (int j = 0; j < num_judges_n; ++j) {
      st.re.r[j] = unit_from_unconstrained(y[c++], &t);
      lj += t;
    }
  }
  if (log_jacobian) *log_jacobian = lj;
  return st;
}

double PosteriorModel::logp_grad(const Vec& y, Vec* grad) const {
  const int m = rubric_.true_levels;
  const int mp = rubric_.assigned_levels;
  const int num_cands = num_candidates();
  const int num_judges_n = num_judges();
  double log_jacobian = 0.0;
  ModelState st = unpack(y, &log_jacobian);

  std::vector<Mat> theta(static_cast<std::size_t>(num_judges_n));
  for (int j = 0; j < num_judges_n; ++j) {
    theta[static_cast<std::size_t>(j)] =
        opts_.fixed_vertices
            ? (*opts_.fixed_vertices)[static_cast<std::size_t>(j)].columns
            : assemble_vertices(st.judge_params.judges[static_cast<std::size_t>(j)], m,
                                mp);
  }

  std::vector<Mat> gtheta;
  std::vector<Vec> gpi(static_cast<std::size_t>(num_cands), Vec::Zero(m));
  std::vector<Vec> gz;
  Vec gw, gr;
  const bool re_active = st.re.active();
  if (grad) {
    gtheta.assign(static_cast<std::size_t>(num_judges_n), Mat::Zero(mp, m));
    if (re_active) {
      gz.assign(static_cast<std::size_t>(num_cands), Vec::Zero(m));
      gw = Vec::Zero(num_cands);
      gr = Vec::Zero(num_judges_n);
    }
  }

  double ll = accumulate_ll(counts_, theta, st.prevalences, st.re,
                            grad ? &gtheta : nullptr, grad ? &gpi : nullptr,
                            grad ? &gz : nullptr, grad ? &gw : nullptr,
                            grad ? &gr : nullptr);
  if (!std::isfinite(ll)) return kNegInf;

  KahanSum lp;
  lp.add(ll);
  lp.add(static_cast<double>(num_cands) * std::lgamma(static_cast<double>(m)));

  std::vector<double> grho;
  std::vector<Vec> groot;
  std::vector<std::vector<std::vector<Vec>>> gnodes;
  if (!opts_.fixed_vertices) {
    grho.assign(static_cast<std::size_t>(num_judges_n), 0.0);
    groot.assign(static_cast<std::size_t>(num_judges_n), Vec::Zero(mp));
    gnodes.resize(static_cast<std::size_t>(num_judges_n));
    for (int j = 0; j < num_judges_n; ++j) {
      auto& judge = st.judge_params.judges[static_cast<std::size_t>(j)];
      auto& gn = gnodes[static_cast<std::size_t>(j)];
      gn.assign(static_cast<std::size_t>(m - 1), {});
      for (int t = 0; t + 1 < m; ++t)
        for (int l = 0; l + 1 < mp; ++l)
          gn[static_cast<std::size_t>(t)].push_back(Vec::Zero(mp - l));
      lp.add(dirichlet_term(judge.root, 0, judge.rho, hyper_.beta_max,
                            grad ? &groot[static_cast<std::size_t>(j)] : nullptr,
                            grad ? &grho[static_cast<std::size_t>(j)] : nullptr));
      for (int t = 0; t + 1 < m; ++t) {
        for (int l = 0; l + 1 < mp; ++l) {
          int rel = (t + 1 >= l) ? t + 1 - l : -1;
          lp.add(dirichlet_term(
              judge.nodes[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)], rel,
              judge.rho, hyper_.beta_max,
              grad ? &gn[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)]
                   : nullptr,
              grad ? &grho[static_cast<std::size_t>(j)] : nullptr));
        }
      }
      if (grad)
        backprop_assembly(judge, theta[static_cast<std::size_t>(j)],
                          gtheta[static_cast<std::size_t>(j)],
                          groot[static_cast<std::size_t>(j)], gn);
    }
  }

  if (re_active) {
    const double aw = hyper_.omega * num_cands, bw = num_cands;
    const double ar = hyper_.omega * num_judges_n, br = num_judges_n;
    for (int k = 0; k < num_cands; ++k) {
      const Vec& z = st.re.z[static_cast<std::size_t>(k)];
      lp.add(dirichlet_log_pdf(z, hyper_.delta));
      lp.add(beta_log_pdf(st.re.w[k], aw, bw));
      if (grad) {
        for (int i = 0; i < m; ++i)
          gz[static_cast<std::size_t>(k)][i] += (hyper_.delta[i] - 1.0) / z[i];
        gw[k] += (aw - 1.0) / st.re.w[k] - (bw - 1.0) / (1.0 - st.re.w[k]);
      }
    }
    for (int j = 0; j < num_judges_n; ++j) {
      lp.add(beta_log_pdf(st.re.r[j], ar, br));
      if (grad)
        gr[j] += (ar - 1.0) / st.re.r[j] - (br - 1.0) / (1.0 - st.re.r[j]);
    }
  }

  lp.add(log_jacobian);
  const double out = lp.value();
  if (!std::isfinite(out)) return kNegInf;
  if (!grad) return out;

  grad->resize(dim_);
  int c = 0;
  for (int k = 0; k < num_cands; ++k) {
    Vec seg = y.segment(c, m - 1);
    grad->segment(c, m - 1) =
        simplex_pullback<double>(seg, gpi[static_cast<std::size_t>(k)], true);
    c += m - 1;
  }
  if (!opts_.fixed_vertices) {
    for (int j = 0; j < num_judges_n; ++j) {
      (*grad)[c] = unit_pullback(y[c], grho[static_cast<std::size_t>(j)], true);
      ++c;
      Vec seg = y.segment(c, mp - 1);
      grad->segment(c, mp - 1) =
          simplex_pullback<double>(seg, groot[static_cast<std::size_t>(j)], true);
      c += mp - 1;
      for (int t = 0; t + 1 < m; ++t) {
        for (int l = 0; l + 1 < mp; ++l) {
          Vec nseg = y.segment(c, mp - 1 - l);
          grad->segment(c, mp - 1 - l) = simplex_pullback<double>(
              nseg,
              gnodes[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)]
                    [static_cast<std::size_t>(l)],
              true);
          c += mp - 1 - l;
        }
      }
    }
  }
  if (re_active) {
    for (int k = 0; k < num_cands; ++k) {
      Vec seg = y.segment(c, m - 1);
      grad->segment(c, m - 1) =
          simplex_pullback<double>(seg, gz[static_cast<std::size_t>(k)], true);
      c += m - 1;
    }
    for (int k = 0; k < num_cands; ++k) {
      (*grad)[c] = unit_pullback(y[c], gw[k], true);
      ++c;
    }
    for (int j = 0; j < num_judges_n; ++j) {
      (*grad)[c] = unit_pullback(y[c], gr[j], true);
      ++c;
    }
  }
  return out;
}

ModelState PosteriorModel::sample_prior_state(std::mt19937_64& rng) const {
  const int m = rubric_.true_levels;
  ModelState st;
  const Vec ones = Vec::Ones(m);
  for (int k = 0; k < num_candidates(); ++k)
    st.prevalences.push_back(sample_dirichlet(ones, rng));
  if (!opts_.fixed_vertices)
    st.judge_params = sample_judge_vertices(rubric_, hyper_, num_judges(), rng);
  st.re = sample_random_effects(hyper_, num_candidates(), num_judges(), rng);
  return st;
}

std::vector<JudgeVertices> PosteriorModel::vertices_of(const ModelState& state) const {
  if (opts_.fixed_vertices) return *opts_.fixed_vertices;
  std::vector<JudgeVertices> out;
  out.reserve(state.judge_params.judges.size());
  for (const auto& judge : state.judge_params.judges)
    out.push_back(JudgeVertices::make(
        assemble_vertices(judge, rubric_.true_levels, rubric_.assigned_levels)));
  return out;
}

Vec PosteriorModel::scores(const ModelState& state) const {
  Vec out(num_candidates());
  for (int k = 0; k < num_candidates(); ++k)
    out[k] = rubric_.level_values.dot(state.prevalences[static_cast<std::size_t>(k)]);
  return out;
}

double log_likelihood(const StratumCounts& counts,
                      const std::vector<JudgeVertices>& vertices,
                      const std::vector<Vec>& prevalences,
                      const RandomEffects& re) {
  if (vertices.size() != counts.judge_ids.size())
    fail("BadDimension", "vertex list does not match judge count");
  if (prevalences.size() != counts.candidate_ids.size())
    fail("BadDimension", "prevalence list does not match candidate count");
  std::vector<Mat> theta;
  theta.reserve(vertices.size());
  for (const auto& v : vertices) theta.push_back(v.columns);
  double ll = accumulate_ll(counts, theta, prevalences, re, nullptr, nullptr, nullptr,
                            nullptr, nullptr);
  if (!std::isfinite(ll))
    fail("NonFinite", "an observed level has zero mixture probability");
  return ll;
}

ModelState find_map(const PosteriorModel& model, std::mt19937_64& rng, int iters,
                    int restarts) {
  const int d = model.dim();
  double best_lp = kNegInf;
  Vec best = Vec::Zero(d);
  for (int r = 0; r < restarts; ++r) {
    Vec y;
    if (r == 0) {
      y = Vec::Zero(d);
    } else {
      y = model.pack(model.sample_prior_state(rng));
    }
    Vec mhat = Vec::Zero(d), vhat = Vec::Zero(d), g(d);
    const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double lp = model.logp_grad(y, &g);
    for (int it = 1; it <= iters; ++it) {
      if (!std::isfinite(lp)) break;
      mhat = b1 * mhat + (1.0 - b1) * g;
      vhat = b2 * vhat + (1.0 - b2) * g.cwiseProduct(g).eval();
      double c1 = 1.0 - std::pow(b1, it), c2 = 1.0 - std::pow(b2, it);
      Vec step = (mhat / c1).cwiseQuotient(((vhat / c2).cwiseSqrt().array() + eps).matrix());
      y += lr * step;
      lp = model.logp_grad(y, &g);
      if (std::isfinite(lp) && lp > best_lp) {
        best_lp = lp;
        best = y;
      }
    }
  }
  if (!std::isfinite(best_lp)) fail("NonFinite", "map search failed to find a finite mode");
  return model.unpack(best);
}

}  // namespace simplexrank
