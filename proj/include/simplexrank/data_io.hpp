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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simplexrank/core_model.hpp"

namespace simplexrank {

// Datasets travel as JSONL (header object, then one record per line) or TSV
// (leading #key=value metadata). Either may be gzip-compressed; loading
// sniffs the compression and the format from the bytes, saving picks both
// from the file name. Serialization is canonical, so load + save round-trips
// bit for bit.

std::string read_file_maybe_gz(const std::string& path);
// Writes via a temp file and rename; compresses when the name ends in .gz.
void write_file_atomic(const std::string& path, const std::string& content);

ScoreDataset parse_dataset(const std::string& text);
ScoreDataset parse_dataset_jsonl(const std::string& text);
ScoreDataset parse_dataset_tsv(const std::string& text);
std::string write_dataset_jsonl(const ScoreDataset& ds);
std::string write_dataset_tsv(const ScoreDataset& ds);

ScoreDataset load_dataset(const std::string& path);
void save_dataset(const ScoreDataset& ds, const std::string& path);

// Ground truth generator. Latent true levels are drawn per question and
// candidate and shared by every judge unless per-judge prevalence shifts are
// active. The correlation knob couples judge errors through one shared
// uniform pushed through each judge's conditional inverse CDF, which leaves
// every judge's marginal untouched.
struct SyntheticSpec {
  RubricSpec rubric;
  std::vector<std::string> strata = {"default"};
  int questions_per_stratum = 100;
  std::vector<std::string> candidate_ids;
  std::vector<Vec> prevalences;  // per candidate, length true_levels
  std::vector<std::string> judge_ids;
  std::vector<Mat> vertices;  // per judge, assigned x true
  double judge_shift_weight = 0.0;
  Vec shift_concentration;  // defaults to ones(true_levels)
  double correlation = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> judge_family;      // defaults to identity
  std::map<std::string, std::string> candidate_family;  // defaults to identity

  void check() const;
};

struct SyntheticTruth {
  RubricSpec rubric;
  std::vector<std::string> candidate_ids;
  std::vector<Vec> prevalences;
  std::vector<std::string> judge_ids;
  std::vector<Mat> vertices;
  // Filled when judge_shift_weight > 0: effective prevalence per judge then
  // candidate.
  std::vector<std::vector<Vec>> per_judge_prevalences;
  Vec scores;  // expected rubric value per candidate
  Ranking ranking;
};

ScoreDataset generate_synthetic(const SyntheticSpec& spec,
                                SyntheticTruth* truth = nullptr);

std::string write_truth_json(const SyntheticTruth& truth);
SyntheticTruth parse_truth_json(const std::string& text);

}  // namespace simplexrank
