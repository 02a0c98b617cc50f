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

#include "simplexrank/judge_runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "simplexrank/common.hpp"

namespace simplexrank {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// The templates below are the exact evaluation prompts the pipeline sends;
// placeholders in [[double brackets]] are filled at render time.

constexpr const char* kBinaryTemplate =
    R"TPL(You are evaluating candidate answers to a multiple-choice question.

- Consistency: How well the candidate's explanation aligns with their final multiple choice selection (1-5 scale).
  * 1 = The explanation contradicts the selected answer
  * 2 = Major disconnects between explanation and selected answer
  * 3 = Explanation partially supports the answer with some inconsistencies
  * 4 = Explanation mostly supports the answer with minor inconsistencies
  * 5 = Explanation perfectly aligns with and justifies the selected answer

- Accuracy: Did the candidate select the correct answer choice? (-1 = no, 1 = yes, 0 = unsure)
  * Provide a concise explanation referencing key facts or reasoning that makes the answer correct or incorrect

<QUESTION>
[[question]]
</QUESTION>

[[candidates_section]]


Respond with a JSON object containing evaluations for all candidates and ensure that your JSON response:
- Uses the exact structure provided below
- Includes only the evaluation without additional preamble or commentary
- Properly escapes any special characters in the reasoning strings

{
  "evaluations" : [
    {
      "model_id": "1",
      "consistency": {
        "reasoning": str,
        "score": int
      },
      "accuracy": {
        "reasoning": str,
        "score": int
      }
    },
    ...
  ]
})TPL";

constexpr const char* kMtbenchTemplate =
    R"TPL(Please act as an impartial judge and evaluate the quality of the responses provided by AI assistants to the user question displayed below. Your evaluation should consider factors such as the helpfulness, relevance, accuracy, depth, creativity, and level of detail of their responses. Avoid any position biases and ensure that the order in which the responses were presented does not influence your decision. Do not allow the length of the responses to influence your evaluation. Do not favor certain names of the assistants.Be as objective as possible. Rate the response on a scale of 1 to 5 (1=Very Bad, 5=Very Good), along with the reasoning.

Initial User Question:
<PROMPT>
[[question]]
</PROMPT>

Assistant Conversation(s):
[[candidates_section]]

{
    "evaluations" : [
    {
        "model_id": "1",
        "overall": {
        "reasoning": str,
        "score": int
        }
    },
    {
        "model_id": "2",
        "overall": {
        "reasoning": str,
        "score": int
        }
    },
    {
        "model_id": "3",
        "overall": {
        "reasoning": str,
        "score": int
        }
    }
    ]
})TPL";

constexpr const char* kTldrTemplate =
    R"TPL(Instructions: In this task you will evaluate the quality of summaries written for a news article. You will be shown the original article and [[num_candidates]] candidate summaries.

To correctly solve this task, follow these steps:

1. Carefully read the original news article provided below.
2. Read the candidate summaries presented in the <CANDIDATE #i ANSWER> sections.
3. Rate each summary on a scale from 1 (very low) to 5 (very high) based on its relevance, consistency, fluency, and coherence. Note that summaries that are very similar on an axis may receive the same score.

Definitions:
*   Relevance: The rating measures how well the summary captures the key points of the article. Summaries in which all and only the important aspects are contained will receive the highest rating.
*   Consistency: The rating measures whether the facts in the summary are consistent with the facts in the original article. The summary should stay true to the facts reported and not make up untrue information.
*   Fluency: This rating measures the quality of individual sentences-are they well-written and grammatically correct?
*   Coherence: This rating measures the quality of all sentences collectively-do they fit together and sound natural? Consider the quality of the summary as a whole.

Original news article:
[[question]]

Candidate Summaries:
[[candidates_section]]

Now provide your scores in the following JSON format. Ensure your response is a single JSON object, starting with { and ending with }, and includes evaluations for all [[num_candidates]] candidates:

{
    "evaluations": [
    // Evaluation for Candidate #1
    {
        "model_id": "1", // Corresponds to Candidate #1
        "relevance": {
        "reasoning": "Provide your reasoning for the relevance score here.",
        "score": int // Score from 1 to 5
        },
        "consistency": {
        "reasoning": "Provide your reasoning for the consistency score here.",
        "score": int // Score from 1 to 5
        },
        "fluency": {
        "reasoning": "Provide your reasoning for the fluency score here.",
        "score": int // Score from 1 to 5
        },
        "coherence": {
        "reasoning": "Provide your reasoning for the coherence score here.",
        "score": int // Score from 1 to 5
        }
    },
    // Add evaluations for Candidate #2, #3, ... up to #[[num_candidates]] following the same structure
    // Example for Candidate #2:
    /*
    {
        "model_id": "2", // Corresponds to Candidate #2
        "relevance": {
        "reasoning": "...",
        "score": int
        },
        "consistency": {
        "reasoning": "...",
        "score": int
        },
        "fluency": {
        "reasoning": "...",
        "score": int
        },
        "coherence": {
        "reasoning": "...",
        "score": int
        }
    }
    */
    // ... other candidates ...
    ]
})TPL";

constexpr const char* kMathNoRefTemplate =
    R"TPL(Instructions: Evaluate the quality of candidate answers to mathematical questions. You will be shown the original question and [[num_candidates]] candidate answers.

To correctly solve this task, follow these steps:

1. Carefully read the original question to understand what is being asked.
2. Read each candidate answer carefully.
3. Rate each answer according to the criteria below based on general mathematical knowledge and reasoning.
4. Provide clear justification for each score with specific references to the candidate's answer.

Rate each answer using the following criteria:

### Accuracy Assessment (1 for correct, 0 for partially correct/borderline, -1 for incorrect)
Based on your mathematical knowledge, how accurate is the candidate answer? Strive to categorize answers as either Correct (1) or Incorrect (-1). Reserve the Partially Correct/Borderline (0) score for answers that contain significant correct elements but also notable errors or omissions, making a definitive Correct/Incorrect judgment difficult, or for answers that are technically correct but incomplete in a way that affects the final conclusion.
* 1 (Correct): The answer is mathematically sound, reaches a valid conclusion, and is substantially free of errors.
* 0 (Partially Correct / Borderline): The answer contains significant correct elements but also notable errors or omissions preventing a clear "Correct" score OR the answer is technically correct but misses key steps or context, making it significantly less complete. Use this score sparingly.
* -1 (Incorrect): The answer contains significant mathematical errors or reaches an incorrect conclusion.

Question:
[[question]]

Candidates Summaries:
[[candidates_section]]

Respond with a JSON object containing evaluations for all candidates and ensure that your JSON response:
- Uses the exact structure provided below
- Includes only the evaluation without additional preamble or commentary
- Properly escapes any special characters in the reasoning strings
- Always output the reasoning before providing a final score

{
  "evaluations" : [
    {
      "model_id": "1",
      "accuracy": {
        "reasoning": str,
        "score": int
      }
    },
    ...
  ]
})TPL";

constexpr const char* kMathWithRefTemplate =
    R"TPL(Instructions: Evaluate the quality of candidate answers to mathematical questions. You will be shown the original question, the ground truth reference answer, and [[num_candidates]] candidate answers.

To correctly solve this task, follow these steps:

1. Carefully read the original question.
2. Carefully read the ground truth reference answer to understand the correct approach and solution.
3. For each candidate answer:
   - Read the entire response
   - Evaluate it against the ground truth reference answer
   - Score it according to the criteria below
   - Provide clear justification for each score with specific references to both the candidate answer and ground truth

Rate each answer using the following criteria relative to the ground truth reference answer:

### Accuracy Assessment (1 for correct, 0 for partially correct/borderline, -1 for incorrect)
Based on the reference answer, how accurate is the candidate answer? Strive to categorize answers as either Correct (1) or Incorrect (-1). Reserve the Partially Correct/Borderline (0) score for answers that contain significant correct elements but also notable errors or omissions, making a definitive Correct/Incorrect judgment difficult, or for answers that are technically correct but incomplete in a way that affects the final conclusion compared to the reference.
* 1 (Correct): The answer reaches the same mathematical conclusion as the reference answer (even if using a different valid approach) and is substantially free of errors.
* 0 (Partially Correct / Borderline): The answer contains significant correct elements but also notable errors or omissions preventing a clear "Correct" score OR the answer is technically correct but misses key steps or context provided in the reference, making it significantly less complete. Use this score sparingly.
* -1 (Incorrect): The answer reaches a different conclusion from the reference answer or contains significant mathematical errors that invalidate the result.

Question:
[[question]]

Ground Truth Reference Answer:
[[ground_truth_answer]]

Candidates Summaries:
[[candidates_section]]

Respond with a JSON object containing evaluations for all candidates and ensure that your JSON response:
- Uses the exact structure provided below
- Includes only the evaluation without additional preamble or commentary
- Properly escapes any special characters in the reasoning strings
- Always output the reasoning before providing a final score

{
  "evaluations" : [
    {
      "model_id": "1",
      "accuracy": {
        "reasoning": str,
        "score": int
      }
    },
    ...
  ]
})TPL";

const char* template_for(TaskKind kind) {
  switch (kind) {
    case TaskKind::kBinaryVerification: return kBinaryTemplate;
    case TaskKind::kMtbenchStyle: return kMtbenchTemplate;
    case TaskKind::kTldrStyle: return kTldrTemplate;
    case TaskKind::kMathNoRef: return kMathNoRefTemplate;
    case TaskKind::kMathWithRef: return kMathWithRefTemplate;
  }
  fail("BadConfig", "unknown task kind");
}

bool accuracy_task(TaskKind kind) {
  return kind == TaskKind::kBinaryVerification ||
         kind == TaskKind::kMathNoRef || kind == TaskKind::kMathWithRef;
}

// Criterion whose score becomes the record level.
const char* criterion_for(TaskKind kind) {
  switch (kind) {
    case TaskKind::kBinaryVerification: return "accuracy";
    case TaskKind::kMtbenchStyle: return "overall";
    case TaskKind::kTldrStyle: return "relevance";
    case TaskKind::kMathNoRef: return "accuracy";
    case TaskKind::kMathWithRef: return "accuracy";
  }
  fail("BadConfig", "unknown task kind");
}

void replace_all(std::string* text, const std::string& needle,
                 const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text->find(needle, pos)) != std::string::npos) {
    text->replace(pos, needle.size(), value);
    pos += value.size();
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string candidate_block(TaskKind kind, int display,
                            const CandidateAnswer& c) {
  std::ostringstream out;
  if (kind == TaskKind::kMtbenchStyle) {
    out << "<CANDIDATE #" << display << ">\n" << c.answer << "\n</CANDIDATE #"
        << display << ">";
    return out.str();
  }
  out << "<CANDIDATE #" << display << " ANSWER>\n" << c.answer
      << "\n</CANDIDATE ANSWER>";
  if (kind == TaskKind::kBinaryVerification) {
    out << "\n\n<CANDIDATE #" << display << " EXPLANATION>\n" << c.explanation
        << "\n</CANDIDATE #" << display << " EXPLANATION>";
  }
  return out.str();
}

// Lenient integer extraction; judges sometimes emit "1" or 1.0.
bool get_int(const json& j, int* out) {
  if (j.is_number_integer()) {
    *out = j.get<int>();
    return true;
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::floor(v)) {
      *out = static_cast<int>(v);
      return true;
    }
    return false;
  }
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() && *end == '\0') {
      *out = static_cast<int>(v);
      return true;
    }
  }
  return false;
}

// Finds the end of the brace-balanced object starting at `start` (which must
// point at '{'), respecting strings and escapes. Returns npos if unbalanced.
std::size_t match_object(const std::string& s, std::size_t start) {
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

json parse_lenient(const std::string& text) {
  return json::parse(text, nullptr, false, /*ignore_comments=*/true);
}

// Pulls whatever complete evaluation entries exist in a possibly truncated
// or noisy response.
std::vector<json> salvage_entries(const std::string& text) {
  std::vector<json> out;
  std::size_t pos = text.find("\"evaluations\"");
  if (pos == std::string::npos) return out;
  pos = text.find('[', pos);
  if (pos == std::string::npos) return out;
  ++pos;
  while (true) {
    const std::size_t next = text.find_first_of("{]", pos);
    if (next == std::string::npos || text[next] == ']') break;
    const std::size_t end = match_object(text, next);
    if (end == std::string::npos) break;
    json entry = parse_lenient(text.substr(next, end - next));
    if (entry.is_discarded()) break;
    out.push_back(std::move(entry));
    pos = end;
  }
  return out;
}

}  // namespace

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "binary-verification") return TaskKind::kBinaryVerification;
  if (name == "mtbench-style") return TaskKind::kMtbenchStyle;
  if (name == "tldr-style") return TaskKind::kTldrStyle;
  if (name == "math-no-ref") return TaskKind::kMathNoRef;
  if (name == "math-with-ref") return TaskKind::kMathWithRef;
  fail("BadConfig", "unknown task kind '" + name + "'");
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kBinaryVerification: return "binary-verification";
    case TaskKind::kMtbenchStyle: return "mtbench-style";
    case TaskKind::kTldrStyle: return "tldr-style";
    case TaskKind::kMathNoRef: return "math-no-ref";
    case TaskKind::kMathWithRef: return "math-with-ref";
  }
  fail("BadConfig", "unknown task kind");
}

RenderedPrompt render_prompt(TaskKind kind, const JudgeQuestion& question,
                             const RubricSpec& rubric, std::uint64_t seed) {
  rubric.check();
  const int expected_scale = accuracy_task(kind) ? 3 : 5;
  if (rubric.assigned_levels != expected_scale)
    fail("BadConfig", "task " + to_string(kind) + " scores on " +
                          std::to_string(expected_scale) +
                          " assigned levels, rubric has " +
                          std::to_string(rubric.assigned_levels));
  if (question.text.empty())
    fail("BadConfig", "question text is empty for " + question.question_id);
  if (question.candidates.empty())
    fail("BadConfig", "no candidates to judge for " + question.question_id);
  if (kind == TaskKind::kMathWithRef && question.reference_answer.empty())
    fail("BadConfig",
         "reference answer required for " + question.question_id);

  RenderedPrompt out;
  const int k = static_cast<int>(question.candidates.size());
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  std::mt19937_64 rng = make_rng(seed, fnv1a(question.question_id));
  for (int i = k - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }

  std::ostringstream section;
  for (int i = 0; i < k; ++i) {
    const CandidateAnswer& c = question.candidates[perm[i]];
    out.order.push_back(c.candidate_id);
    if (i > 0) section << "\n\n";
    section << candidate_block(kind, i + 1, c);
  }

  out.text = template_for(kind);
  replace_all(&out.text, "[[question]]", question.text);
  replace_all(&out.text, "[[candidates_section]]", section.str());
  replace_all(&out.text, "[[num_candidates]]", std::to_string(k));
  replace_all(&out.text, "[[ground_truth_answer]]", question.reference_answer);
  return out;
}

std::vector<ParsedScore> parse_evaluations(
    const std::string& response_text,
    const std::vector<std::string>& expected_ids, TaskKind kind,
    const RubricSpec& rubric) {
  if (expected_ids.empty()) fail("BadConfig", "expected_ids is empty");
  const int k = static_cast<int>(expected_ids.size());
  const char* criterion = criterion_for(kind);

  std::vector<json> entries;
  const std::size_t first = response_text.find('{');
  if (first != std::string::npos) {
    const std::size_t end = match_object(response_text, first);
    if (end != std::string::npos) {
      json root = parse_lenient(response_text.substr(first, end - first));
      if (!root.is_discarded() && root.is_object() &&
          root.contains("evaluations") && root["evaluations"].is_array()) {
        for (json& e : root["evaluations"]) entries.push_back(std::move(e));
      }
    }
  }
  if (entries.empty()) entries = salvage_entries(response_text);
  if (entries.empty())
    fail("MalformedResponse", "response contains no parsable evaluations");

  std::vector<ParsedScore> by_slot(static_cast<std::size_t>(k));
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (const json& entry : entries) {
    if (!entry.is_object() || !entry.contains("model_id"))
      fail("MalformedResponse", "evaluation entry lacks a model_id");
    int display = 0;
    if (!get_int(entry["model_id"], &display) || display < 1 || display > k)
      fail("MalformedResponse",
           "model_id " + entry["model_id"].dump() + " is outside 1.." +
               std::to_string(k));
    if (seen[display - 1])
      fail("MalformedResponse",
           "duplicate evaluation for candidate " + std::to_string(display));
    if (!entry.contains(criterion) || !entry[criterion].is_object() ||
        !entry[criterion].contains("score"))
      fail("MalformedResponse", std::string("evaluation entry lacks a ") +
                                    criterion + " score");
    int score = 0;
    if (!get_int(entry[criterion]["score"], &score))
      fail("MalformedResponse",
           std::string(criterion) + " score is not an integer");
    ParsedScore parsed;
    parsed.candidate_id = expected_ids[display - 1];
    if (accuracy_task(kind)) {
      if (score < -1 || score > 1)
        fail("MalformedResponse",
             "accuracy score " + std::to_string(score) + " not in {-1,0,1}");
      parsed.level = score + 2;
    } else {
      if (score < 1 || score > rubric.assigned_levels)
        fail("MalformedResponse", "score " + std::to_string(score) +
                                      " outside 1.." +
                                      std::to_string(rubric.assigned_levels));
      parsed.level = score;
    }
    if (kind == TaskKind::kBinaryVerification && entry.contains("consistency") &&
        entry["consistency"].is_object() &&
        entry["consistency"].contains("score")) {
      get_int(entry["consistency"]["score"], &parsed.consistency);
    }
    by_slot[display - 1] = std::move(parsed);
    seen[display - 1] = true;
  }

  std::string missing;
  for (int i = 0; i < k; ++i) {
    if (seen[i]) continue;
    if (!missing.empty()) missing += ", ";
    missing += std::to_string(i + 1) + " (" + expected_ids[i] + ")";
  }
  if (!missing.empty())
    fail("MissingCandidate", "no evaluation for candidate " + missing);
  return by_slot;
}

EndpointConfig endpoint_from_env() {
  EndpointConfig cfg;
  if (const char* v = std::getenv("SIMPLEXRANK_BASE_URL")) cfg.base_url = v;
  if (const char* v = std::getenv("SIMPLEXRANK_API_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("SIMPLEXRANK_MODEL")) cfg.model = v;
  if (cfg.base_url.empty())
    fail("BadConfig", "SIMPLEXRANK_BASE_URL is not set");
  return cfg;
}

namespace {

class HttpTransport : public Transport {
 public:
  explicit HttpTransport(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    // Split https://host[:port]/prefix into the client root and path prefix.
    const std::size_t scheme = cfg_.base_url.find("://");
    if (scheme == std::string::npos)
      fail("BadConfig", "base URL must include a scheme: " + cfg_.base_url);
    const std::size_t slash = cfg_.base_url.find('/', scheme + 3);
    if (slash == std::string::npos) {
      root_ = cfg_.base_url;
    } else {
      root_ = cfg_.base_url.substr(0, slash);
      prefix_ = cfg_.base_url.substr(slash);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  std::string complete(const std::string& model,
                       const std::string& prompt) override {
    httplib::Client client(root_);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    httplib::Headers headers;
    if (!cfg_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    json body = {
        {"model", cfg_.model.empty() ? model : cfg_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
    };
    auto res = client.Post(prefix_ + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res)
      fail("TransportError",
           "no response from " + root_ + ": " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      fail("AuthError", "endpoint rejected credentials (HTTP " +
                            std::to_string(res->status) + "): " + res->body);
    if (res->status == 429)
      fail("QuotaError", "endpoint rate limited (HTTP 429): " + res->body);
    if (res->status >= 500)
      fail("TransportError",
           "endpoint error (HTTP " + std::to_string(res->status) + ")");
    if (res->status != 200)
      fail("BadRequest", "endpoint returned HTTP " +
                             std::to_string(res->status) + ": " + res->body);
    json reply = parse_lenient(res->body);
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array() || reply["choices"].empty())
      fail("MalformedResponse", "chat response has no choices");
    const json& msg = reply["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
      fail("MalformedResponse", "chat response has no message content");
    return msg["message"]["content"].get<std::string>();
  }

 private:
  EndpointConfig cfg_;
  std::string root_, prefix_;
};

bool fatal_code(const std::string& code) {
  return code == "AuthError" || code == "BadRequest" || code == "BadConfig";
}

std::string task_key(const std::string& stratum, const std::string& qid,
                     const std::string& judge) {
  return stratum + '\x1f' + qid + '\x1f' + judge;
}

struct Completed {
  std::vector<ParsedScore> scores;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const EndpointConfig& endpoint) {
  return std::make_unique<HttpTransport>(endpoint);
}

void JudgeRunConfig::check() const {
  rubric.check();
  if (judge_ids.empty()) fail("BadConfig", "no judges configured");
  std::set<std::string> unique(judge_ids.begin(), judge_ids.end());
  if (unique.size() != judge_ids.size())
    fail("BadConfig", "duplicate judge ids");
  if (concurrency < 1) fail("BadConfig", "concurrency must be positive");
  if (max_retries < 0) fail("BadConfig", "max_retries must be nonnegative");
  if (backoff_initial_ms < 0.0)
    fail("BadConfig", "backoff must be nonnegative");
}

ScoreDataset run_judging(Transport& transport,
                         const std::vector<JudgeQuestion>& questions,
                         const JudgeRunConfig& cfg) {
  cfg.check();
  if (questions.empty()) fail("EmptyDataset", "no questions to judge");
  {
    std::set<std::pair<std::string, std::string>> keys;
    for (const JudgeQuestion& q : questions)
      if (!keys.insert({q.stratum, q.question_id}).second)
        fail("BadConfig", "duplicate question id " + q.question_id +
                              " in stratum " + q.stratum);
  }

  // Resume: completed pairs in the checkpoint are not re-requested.
  std::map<std::string, Completed> done;
  if (!cfg.checkpoint_path.empty()) {
    std::ifstream in(cfg.checkpoint_path);
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      json entry = parse_lenient(line);
      if (entry.is_discarded() || !entry.is_object()) continue;
      if (entry.contains("error")) continue;
      if (!entry.contains("question_id") || !entry.contains("judge_id") ||
          !entry.contains("scores") || !entry["scores"].is_array())
        continue;
      Completed c;
      bool ok = true;
      for (const json& s : entry["scores"]) {
        if (!s.contains("candidate_id") || !s.contains("level")) {
          ok = false;
          break;
        }
        ParsedScore p;
        p.candidate_id = s["candidate_id"].get<std::string>();
        p.level = s["level"].get<int>();
        if (s.contains("consistency")) p.consistency = s["consistency"].get<int>();
        c.scores.push_back(std::move(p));
      }
      if (!ok) continue;
      const std::string stratum =
          entry.contains("stratum") ? entry["stratum"].get<std::string>()
                                    : std::string("default");
      done[task_key(stratum, entry["question_id"].get<std::string>(),
                    entry["judge_id"].get<std::string>())] = std::move(c);
    }
  }

  struct Task {
    const JudgeQuestion* question;
    const std::string* judge;
  };
  std::vector<Task> tasks;
  for (const JudgeQuestion& q : questions)
    for (const std::string& j : cfg.judge_ids)
      if (!done.count(task_key(q.stratum, q.question_id, j)))
        tasks.push_back({&q, &j});

  std::mutex mu;  // guards done, the checkpoint file, and first_error
  std::exception_ptr first_error;
  std::atomic<bool> abort{false};
  std::atomic<std::size_t> next{0};

  auto append_checkpoint = [&](const ordered_json& line) {
    if (cfg.checkpoint_path.empty()) return;
    std::ofstream out(cfg.checkpoint_path, std::ios::app);
    out << line.dump() << '\n';
  };

  auto worker = [&]() {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const JudgeQuestion& q = *tasks[i].question;
      const std::string& judge = *tasks[i].judge;
      const std::uint64_t call_seed = splitmix64(cfg.seed ^ fnv1a(judge));

      std::string raw;
      std::vector<ParsedScore> scores;
      int attempts = 0;
      std::string last_error;
      bool success = false;
      try {
        const RenderedPrompt prompt =
            render_prompt(cfg.kind, q, cfg.rubric, call_seed);
        for (int a = 0; a <= cfg.max_retries; ++a) {
          attempts = a + 1;
          try {
            raw = transport.complete(judge, prompt.text);
            scores = parse_evaluations(raw, prompt.order, cfg.kind, cfg.rubric);
            success = true;
            break;
          } catch (const Error& e) {
            last_error = e.what();
            if (fatal_code(e.code()) || a == cfg.max_retries) throw;
            const double ms = cfg.backoff_initial_ms * std::ldexp(1.0, a);
            if (ms > 0.0)
              std::this_thread::sleep_for(std::chrono::duration<double,
                                          std::milli>(ms));
          }
        }
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        ordered_json line{{"question_id", q.question_id},
                          {"stratum", q.stratum},
                          {"judge_id", judge},
                          {"attempts", attempts},
                          {"raw", raw},
                          {"error", std::string(e.what())}};
        append_checkpoint(line);
        if (!first_error) {
          std::string msg = e.what();
          const std::string prefix = e.code() + ": ";
          if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
          first_error = std::make_exception_ptr(
              Error(e.code(), "judge " + judge + " on question " +
                                  q.question_id + ": " + msg));
        }
        abort.store(true);
        return;
      }
      if (!success) continue;

      std::lock_guard<std::mutex> lock(mu);
      ordered_json score_list = ordered_json::array();
      for (const ParsedScore& p : scores)
        score_list.push_back(ordered_json{{"candidate_id", p.candidate_id},
                                          {"level", p.level},
                                          {"consistency", p.consistency}});
      ordered_json line{{"question_id", q.question_id},
                        {"stratum", q.stratum},
                        {"judge_id", judge},
                        {"attempts", attempts},
                        {"raw", raw},
                        {"scores", score_list}};
      append_checkpoint(line);
      done[task_key(q.stratum, q.question_id, judge)] =
          Completed{std::move(scores)};
    }
  };

  const int workers =
      std::min<int>(cfg.concurrency, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  ScoreDataset ds;
  ds.rubric = cfg.rubric;
  ds.judge_family = cfg.judge_family;
  ds.candidate_family = cfg.candidate_family;
  for (const JudgeQuestion& q : questions) {
    for (const std::string& judge : cfg.judge_ids) {
      const auto it = done.find(task_key(q.stratum, q.question_id, judge));
      if (it == done.end())
        fail("IoError", "missing judging result for question " +
                            q.question_id + " judge " + judge);
      for (const ParsedScore& p : it->second.scores) {
        ScoreRecord rec;
        rec.question_id = q.question_id;
        rec.judge_id = judge;
        rec.candidate_id = p.candidate_id;
        rec.stratum = q.stratum;
        rec.level = p.level;
        ds.records.push_back(std::move(rec));
      }
    }
  }
  std::sort(ds.records.begin(), ds.records.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) {
              return std::tie(a.stratum, a.question_id, a.judge_id,
                              a.candidate_id) <
                     std::tie(b.stratum, b.question_id, b.judge_id,
                              b.candidate_id);
            });
  ds.default_families();
  return ds;
}

}  // namespace simplexrank
