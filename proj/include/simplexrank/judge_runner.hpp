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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "simplexrank/core_model.hpp"

namespace simplexrank {

// Client that renders judging prompts, calls a chat-completion endpoint, and
// assembles the returned scores into a ScoreDataset. The transport is an
// injected interface so everything is testable offline.

enum class TaskKind {
  kBinaryVerification,
  kMtbenchStyle,
  kTldrStyle,
  kMathNoRef,
  kMathWithRef,
};

TaskKind task_kind_from_string(const std::string& name);
std::string to_string(TaskKind kind);

struct CandidateAnswer {
  std::string candidate_id;
  std::string answer;       // answer, response, summary, or solution text
  std::string explanation;  // rationale; used by the binary template only
};

struct JudgeQuestion {
  std::string question_id;
  std::string stratum = "default";
  std::string text;              // question, article, or problem statement
  std::string reference_answer;  // required by the with-reference math task
  std::vector<CandidateAnswer> candidates;
};

// Rendered prompt text plus the randomized candidate order: display slot
// i+1 shows candidates order[i].
struct RenderedPrompt {
  std::string text;
  std::vector<std::string> order;
};

// Fills the task template for one question. Candidate display order is
// shuffled deterministically from the seed and the question id. The rubric
// pins the expected score scale (3 assigned levels for accuracy tasks, 5 for
// quality-rating tasks).
RenderedPrompt render_prompt(TaskKind kind, const JudgeQuestion& question,
                             const RubricSpec& rubric, std::uint64_t seed);

struct ParsedScore {
  std::string candidate_id;
  int level = 0;        // mapped to the rubric's assigned levels
  int consistency = 0;  // binary task side rating, kept for the audit trail
};

// Extracts the evaluations array from a judge response and maps display ids
// back through `expected_ids` (the render-time order). Accuracy tasks map
// scores -1/0/1 to levels 1/2/3; rating tasks use the score as the level.
// Truncated or noisy responses are salvaged entry by entry; anything still
// missing raises MissingCandidate, unusable text raises MalformedResponse.
std::vector<ParsedScore> parse_evaluations(
    const std::string& response_text,
    const std::vector<std::string>& expected_ids, TaskKind kind,
    const RubricSpec& rubric);

// Sends one prompt to one judge model and returns the assistant text.
// Implementations throw Error with code TransportError or QuotaError for
// retryable failures and AuthError or BadRequest for fatal ones.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const std::string& model,
                               const std::string& prompt) = 0;
};

// Wraps a callable; the standard mock for tests.
class FunctionTransport : public Transport {
 public:
  using Fn = std::function<std::string(const std::string&, const std::string&)>;
  explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const std::string& model,
                       const std::string& prompt) override {
    return fn_(model, prompt);
  }

 private:
  Fn fn_;
};

struct EndpointConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string api_key;   // sent as a bearer token when nonempty
  std::string model;     // overrides the per-judge model name when nonempty
};

// Reads SIMPLEXRANK_BASE_URL, SIMPLEXRANK_API_KEY, SIMPLEXRANK_MODEL.
EndpointConfig endpoint_from_env();

// HTTPS chat-completion client. Request body:
//   {"model": ..., "messages": [{"role": "user", "content": ...}]}
// Response: first choices[].message.content string.
std::unique_ptr<Transport> make_http_transport(const EndpointConfig& endpoint);

struct JudgeRunConfig {
  TaskKind kind = TaskKind::kBinaryVerification;
  RubricSpec rubric;
  std::vector<std::string> judge_ids;  // doubles as the model name per judge
  int concurrency = 4;                 // max in-flight requests
  int max_retries = 3;                 // extra attempts after the first
  double backoff_initial_ms = 250.0;   // doubles per retry
  std::uint64_t seed = 0;              // candidate order shuffling
  std::string checkpoint_path;         // JSONL audit log; enables resume
  std::map<std::string, std::string> judge_family;
  std::map<std::string, std::string> candidate_family;

  void check() const;
};

// Judges every (question, judge) pair and returns the assembled dataset.
// Completed pairs are appended to the checkpoint with the verbatim raw
// response; a rerun with the same checkpoint path skips them. Record order
// in the result is sorted, independent of scheduling.
ScoreDataset run_judging(Transport& transport,
                         const std::vector<JudgeQuestion>& questions,
                         const JudgeRunConfig& cfg);

}  // namespace simplexrank
