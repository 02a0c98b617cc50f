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

#include "simplexrank/data_io.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "simplexrank/geometry.hpp"

namespace simplexrank {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json vec_to_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(a.size());
  Eigen::Index i = 0;
  for (const auto& x : a) v[i++] = x.get<double>();
  return v;
}

ordered_json mat_to_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Mat mat_from_json(const json& rows) {
  if (rows.empty()) fail("BadFormat", "empty matrix");
  Mat m(rows.size(), rows.front().size());
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(m.cols()))
      fail("BadFormat", "ragged matrix rows");
    Eigen::Index c = 0;
    for (const auto& x : row) m(r, c++) = x.get<double>();
    ++r;
  }
  return m;
}

RubricSpec rubric_from_json(const json& j) {
  RubricSpec r;
  r.true_levels = j.at("true_levels").get<int>();
  r.assigned_levels = j.at("assigned_levels").get<int>();
  r.level_values = vec_from_json(j.at("level_values"));
  r.check();
  return r;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find('\t', start);
    if (end == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

}  // namespace

std::string read_file_maybe_gz(const std::string& path) {
  // gzread passes plain files through untouched, so one path covers both.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) fail("IoError", "cannot open " + path);
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool bad = n < 0;
  gzclose(f);
  if (bad) fail("IoError", "decompression failed for " + path);
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (gz) {
    gzFile f = gzopen(tmp.c_str(), "wb9");
    if (!f) fail("IoError", "cannot open " + tmp);
    std::size_t off = 0;
    while (off < content.size()) {
      const unsigned chunk = static_cast<unsigned>(
          std::min<std::size_t>(content.size() - off, 1u << 20));
      if (gzwrite(f, content.data() + off, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        fail("IoError", "write failed for " + tmp);
      }
      off += chunk;
    }
    if (gzclose(f) != Z_OK) fail("IoError", "close failed for " + tmp);
  } else {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) fail("IoError", "cannot open " + tmp);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) fail("IoError", "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail("IoError", "rename failed for " + path);
}

ScoreDataset parse_dataset(const std::string& text) {
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') continue;
    if (ch == '{') return parse_dataset_jsonl(text);
    return parse_dataset_tsv(text);
  }
  fail("BadFormat", "empty dataset text");
}

ScoreDataset parse_dataset_jsonl(const std::string& text) {
  ScoreDataset ds;
  bool have_header = false;
  std::size_t lineno = 0;
  for (const auto& line : split_lines(text)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      fail("BadFormat", "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      if (j.value("schema", "") != std::string("simplexrank/scores"))
        fail("BadFormat", "missing dataset header");
      ds.rubric = rubric_from_json(j.at("rubric"));
      if (j.contains("judge_families"))
        for (auto it = j["judge_families"].begin(); it != j["judge_families"].end(); ++it)
          ds.judge_family[it.key()] = it.value().get<std::string>();
      if (j.contains("candidate_families"))
        for (auto it = j["candidate_families"].begin();
             it != j["candidate_families"].end(); ++it)
          ds.candidate_family[it.key()] = it.value().get<std::string>();
      have_header = true;
      continue;
    }
    ScoreRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.judge_id = j.at("judge_id").get<std::string>();
    r.candidate_id = j.at("candidate_id").get<std::string>();
    r.stratum = j.value("stratum", "default");
    r.level = j.at("level").get<int>();
    ds.records.push_back(std::move(r));
  }
  if (!have_header) fail("BadFormat", "missing dataset header");
  return ds;
}

std::string write_dataset_jsonl(const ScoreDataset& ds) {
  std::ostringstream os;
  ordered_json header;
  header["schema"] = "simplexrank/scores";
  header["schema_version"] = 1;
  header["rubric"] = ordered_json::object();
  header["rubric"]["true_levels"] = ds.rubric.true_levels;
  header["rubric"]["assigned_levels"] = ds.rubric.assigned_levels;
  header["rubric"]["level_values"] = vec_to_json(ds.rubric.level_values);
  ordered_json jf = ordered_json::object(), cf = ordered_json::object();
  for (const auto& [k, v] : ds.judge_family) jf[k] = v;
  for (const auto& [k, v] : ds.candidate_family) cf[k] = v;
  header["judge_families"] = jf;
  header["candidate_families"] = cf;
  os << header.dump() << "\n";
  for (const auto& r : ds.records) {
    ordered_json j;
    j["question_id"] = r.question_id;
    j["judge_id"] = r.judge_id;
    j["candidate_id"] = r.candidate_id;
    j["stratum"] = r.stratum;
    j["level"] = r.level;
    os << j.dump() << "\n";
  }
  return os.str();
}

ScoreDataset parse_dataset_tsv(const std::string& text) {
  ScoreDataset ds;
  bool have_rubric = false, have_cols = false;
  int col_q = -1, col_j = -1, col_c = -1, col_s = -1, col_l = -1;
  std::size_t lineno = 0;
  int true_levels = 0, assigned_levels = 0;
  std::optional<Vec> level_values;
  for (const auto& raw : split_lines(text)) {
    ++lineno;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      while (!key.empty() && key.front() == ' ') key.erase(key.begin());
      while (!key.empty() && key.back() == ' ') key.pop_back();
      std::string val = line.substr(eq + 1);
      if (key == "true_levels") {
        true_levels = std::stoi(val);
      } else if (key == "assigned_levels") {
        assigned_levels = std::stoi(val);
      } else if (key == "level_values") {
        std::vector<double> vals;
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        Vec v(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
        level_values = v;
      } else if (key.rfind("judge_family.", 0) == 0) {
        ds.judge_family[key.substr(13)] = val;
      } else if (key.rfind("candidate_family.", 0) == 0) {
        ds.candidate_family[key.substr(17)] = val;
      }
      continue;
    }
    if (!have_cols) {
      if (true_levels < 2 || assigned_levels < 2)
        fail("BadFormat", "missing rubric metadata before data rows");
      ds.rubric = RubricSpec::make(true_levels, assigned_levels, level_values);
      have_rubric = true;
      const auto cols = split_tabs(line);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "question_id") col_q = static_cast<int>(i);
        else if (cols[i] == "judge_id") col_j = static_cast<int>(i);
        else if (cols[i] == "candidate_id") col_c = static_cast<int>(i);
        else if (cols[i] == "stratum") col_s = static_cast<int>(i);
        else if (cols[i] == "level") col_l = static_cast<int>(i);
      }
      if (col_q < 0 || col_j < 0 || col_c < 0 || col_l < 0)
        fail("BadFormat", "missing required columns in header row");
      have_cols = true;
      continue;
    }
    const auto f = split_tabs(line);
    auto field = [&](int idx) -> const std::string& {
      if (idx < 0 || static_cast<std::size_t>(idx) >= f.size())
        fail("BadFormat", "line " + std::to_string(lineno) + ": short row");
      return f[static_cast<std::size_t>(idx)];
    };
    ScoreRecord r;
    r.question_id = field(col_q);
    r.judge_id = field(col_j);
    r.candidate_id = field(col_c);
    r.stratum = col_s >= 0 && static_cast<std::size_t>(col_s) < f.size()
                    ? f[static_cast<std::size_t>(col_s)]
                    : "default";
    try {
      r.level = std::stoi(field(col_l));
    } catch (const std::exception&) {
      fail("BadFormat", "line " + std::to_string(lineno) + ": bad level");
    }
    ds.records.push_back(std::move(r));
  }
  if (!have_rubric) fail("BadFormat", "no data rows");
  return ds;
}

std::string write_dataset_tsv(const ScoreDataset& ds) {
  std::ostringstream os;
  os << "# schema=simplexrank/scores\n";
  os << "# schema_version=1\n";
  os << "# true_levels=" << ds.rubric.true_levels << "\n";
  os << "# assigned_levels=" << ds.rubric.assigned_levels << "\n";
  os << "# level_values=";
  for (Eigen::Index i = 0; i < ds.rubric.level_values.size(); ++i) {
    if (i) os << ',';
    os << fmt_double(ds.rubric.level_values[i]);
  }
  os << "\n";
  for (const auto& [k, v] : ds.judge_family) os << "# judge_family." << k << "=" << v << "\n";
  for (const auto& [k, v] : ds.candidate_family)
    os << "# candidate_family." << k << "=" << v << "\n";
  os << "question_id\tjudge_id\tcandidate_id\tstratum\tlevel\n";
  for (const auto& r : ds.records)
    os << r.question_id << '\t' << r.judge_id << '\t' << r.candidate_id << '\t'
       << r.stratum << '\t' << r.level << '\n';
  return os.str();
}

ScoreDataset load_dataset(const std::string& path) {
  return parse_dataset(read_file_maybe_gz(path));
}

void save_dataset(const ScoreDataset& ds, const std::string& path) {
  std::string stem = path;
  if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, ".gz") == 0)
    stem = stem.substr(0, stem.size() - 3);
  const bool tsv = stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".tsv") == 0;
  write_file_atomic(path, tsv ? write_dataset_tsv(ds) : write_dataset_jsonl(ds));
}

void SyntheticSpec::check() const {
  rubric.check();
  if (strata.empty()) fail("BadConfig", "need at least one stratum");
  if (questions_per_stratum < 1) fail("BadConfig", "need at least one question");
  if (candidate_ids.empty() || candidate_ids.size() != prevalences.size())
    fail("BadConfig", "candidate ids and prevalences must align");
  if (judge_ids.empty() || judge_ids.size() != vertices.size())
    fail("BadConfig", "judge ids and vertices must align");
  for (const auto& p : prevalences) {
    if (p.size() != rubric.true_levels) fail("BadConfig", "prevalence length mismatch");
    check_distribution(p, "prevalence");
  }
  for (const auto& v : vertices) {
    if (v.rows() != rubric.assigned_levels || v.cols() != rubric.true_levels)
      fail("BadConfig", "vertex shape mismatch");
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      check_distribution(v.col(c), "vertex column");
  }
  if (judge_shift_weight < 0.0 || judge_shift_weight > 1.0)
    fail("BadConfig", "shift weight outside [0, 1]");
  if (correlation < 0.0 || correlation > 1.0)
    fail("BadConfig", "correlation outside [0, 1]");
}

ScoreDataset generate_synthetic(const SyntheticSpec& spec, SyntheticTruth* truth) {
  spec.check();
  const int m = spec.rubric.true_levels;
  const int mp = spec.rubric.assigned_levels;
  const int num_cands = static_cast<int>(spec.candidate_ids.size());
  const int num_judges = static_cast<int>(spec.judge_ids.size());
  std::mt19937_64 rng = make_rng(spec.seed, 0x5eedu);

  auto draw_cat = [&](const Vec& p, double u) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size() - 1);
  };

  // Per-judge effective prevalences; identical to the base unless shifted.
  std::vector<std::vector<Vec>> eff(static_cast<std::size_t>(num_judges));
  Vec conc = spec.shift_concentration.size() == m ? spec.shift_concentration
                                                  : Vec::Ones(m);
  for (int j = 0; j < num_judges; ++j) {
    auto& per = eff[static_cast<std::size_t>(j)];
    per.reserve(static_cast<std::size_t>(num_cands));
    for (int k = 0; k < num_cands; ++k) {
      if (spec.judge_shift_weight > 0.0) {
        Vec z = sample_dirichlet(conc, rng);
        per.push_back((1.0 - spec.judge_shift_weight) *
                          spec.prevalences[static_cast<std::size_t>(k)] +
                      spec.judge_shift_weight * z);
      } else {
        per.push_back(spec.prevalences[static_cast<std::size_t>(k)]);
      }
    }
  }
  const bool shifted = spec.judge_shift_weight > 0.0;

  ScoreDataset ds;
  ds.rubric = spec.rubric;
  ds.judge_family = spec.judge_family;
  ds.candidate_family = spec.candidate_family;
  for (const auto& id : spec.judge_ids)
    if (!ds.judge_family.count(id)) ds.judge_family[id] = id;
  for (const auto& id : spec.candidate_ids)
    if (!ds.candidate_family.count(id)) ds.candidate_family[id] = id;

  // One substream per question keeps generation order-free and lets callers
  // parallelize over questions without changing the output.
  const bool prefix_stratum = spec.strata.size() > 1;
  std::uint64_t qstream = 0x71u;
  for (const auto& stratum : spec.strata) {
    for (int q = 0; q < spec.questions_per_stratum; ++q) {
      std::mt19937_64 qrng = make_rng(spec.seed, ++qstream);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      char qb[32];
      std::snprintf(qb, sizeof(qb), "q%05d", q);
      const std::string qid = prefix_stratum ? stratum + "-" + qb : std::string(qb);
      for (int k = 0; k < num_cands; ++k) {
        const int shared_true = draw_cat(spec.prevalences[static_cast<std::size_t>(k)],
                                         unif(qrng));
        const bool coupled = spec.correlation > 0.0 && unif(qrng) < spec.correlation;
        const double shared_u = unif(qrng);
        for (int j = 0; j < num_judges; ++j) {
          int true_level = shared_true;
          if (shifted)
            true_level = draw_cat(eff[static_cast<std::size_t>(j)]
                                     [static_cast<std::size_t>(k)],
                                  unif(qrng));
          const Vec col = spec.vertices[static_cast<std::size_t>(j)].col(true_level);
          const double u = coupled ? shared_u : unif(qrng);
          const int assigned = draw_cat(col, u);
          ScoreRecord r;
          r.question_id = qid;
          r.judge_id = spec.judge_ids[static_cast<std::size_t>(j)];
          r.candidate_id = spec.candidate_ids[static_cast<std::size_t>(k)];
          r.stratum = stratum;
          r.level = assigned + 1;
          ds.records.push_back(std::move(r));
        }
      }
    }
  }

  if (truth) {
    truth->rubric = spec.rubric;
    truth->candidate_ids = spec.candidate_ids;
    truth->prevalences = spec.prevalences;
    truth->judge_ids = spec.judge_ids;
    truth->vertices = spec.vertices;
    truth->per_judge_prevalences = shifted ? eff : std::vector<std::vector<Vec>>{};
    truth->scores.resize(num_cands);
    std::vector<std::pair<std::string, double>> point;
    for (int k = 0; k < num_cands; ++k) {
      truth->scores[k] = spec.rubric.level_values.dot(
          spec.prevalences[static_cast<std::size_t>(k)]);
      point.emplace_back(spec.candidate_ids[static_cast<std::size_t>(k)],
                         truth->scores[k]);
    }
    truth->ranking = make_ranking(point);
  }
  (void)mp;
  return ds;
}

std::string write_truth_json(const SyntheticTruth& truth) {
  ordered_json j;
  j["schema"] = "simplexrank/truth";
  j["schema_version"] = 1;
  j["rubric"] = ordered_json::object();
  j["rubric"]["true_levels"] = truth.rubric.true_levels;
  j["rubric"]["assigned_levels"] = truth.rubric.assigned_levels;
  j["rubric"]["level_values"] = vec_to_json(truth.rubric.level_values);
  ordered_json cands = ordered_json::array();
  for (std::size_t k = 0; k < truth.candidate_ids.size(); ++k) {
    ordered_json c;
    c["candidate_id"] = truth.candidate_ids[k];
    c["prevalence"] = vec_to_json(truth.prevalences[k]);
    c["score"] = truth.scores[static_cast<Eigen::Index>(k)];
    cands.push_back(c);
  }
  j["candidates"] = cands;
  ordered_json verts = ordered_json::object();
  for (std::size_t i = 0; i < truth.judge_ids.size(); ++i)
    verts[truth.judge_ids[i]] = mat_to_json(truth.vertices[i]);
  j["vertices"] = verts;
  if (!truth.per_judge_prevalences.empty()) {
    ordered_json shifts = ordered_json::object();
    for (std::size_t i = 0; i < truth.judge_ids.size(); ++i) {
      ordered_json per = ordered_json::array();
      for (const auto& p : truth.per_judge_prevalences[i]) per.push_back(vec_to_json(p));
      shifts[truth.judge_ids[i]] = per;
    }
    j["per_judge_prevalences"] = shifts;
  }
  ordered_json rk;
  rk["order"] = truth.ranking.order;
  rk["tie_groups"] = truth.ranking.tie_groups;
  j["ranking"] = rk;
  return j.dump(2) + "\n";
}

SyntheticTruth parse_truth_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("schema", "") != std::string("simplexrank/truth"))
    fail("BadFormat", "not a truth document");
  SyntheticTruth t;
  t.rubric = rubric_from_json(j.at("rubric"));
  for (const auto& c : j.at("candidates")) {
    t.candidate_ids.push_back(c.at("candidate_id").get<std::string>());
    t.prevalences.push_back(vec_from_json(c.at("prevalence")));
  }
  t.scores.resize(static_cast<Eigen::Index>(t.candidate_ids.size()));
  Eigen::Index i = 0;
  for (const auto& c : j.at("candidates")) t.scores[i++] = c.at("score").get<double>();
  if (j.contains("vertices")) {
    const auto& verts = j["vertices"];
    for (auto it = verts.begin(); it != verts.end(); ++it) {
      t.judge_ids.push_back(it.key());
      t.vertices.push_back(mat_from_json(it.value()));
    }
  }
  if (j.contains("per_judge_prevalences")) {
    for (const auto& jid : t.judge_ids) {
      std::vector<Vec> per;
      for (const auto& p : j["per_judge_prevalences"].at(jid))
        per.push_back(vec_from_json(p));
      t.per_judge_prevalences.push_back(std::move(per));
    }
  }
  const auto& rk = j.at("ranking");
  t.ranking.order = rk.at("order").get<std::vector<std::string>>();
  t.ranking.tie_groups = rk.at("tie_groups").get<std::vector<std::vector<std::string>>>();
  return t;
}

}  // namespace simplexrank
