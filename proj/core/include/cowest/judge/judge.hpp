#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cowest/backend/backend.hpp"
#include "cowest/backend/cache.hpp"
#include "cowest/collab/templates.hpp"
#include "cowest/core/records.hpp"

namespace cowest::judge {

/// Judge verdict. `total` is the judge's own overall score, never recomputed
/// from the sub-scores.
struct EvalScore {
  int coherence = 1;
  int consistency = 1;
  int total = 1;
  std::string raw_reply;

  friend bool operator==(const EvalScore&, const EvalScore&) = default;
};

struct ParsedScores {
  int coherence = 0;
  int consistency = 0;
  int total = 0;

  friend bool operator==(const ParsedScores&, const ParsedScores&) = default;
};

// Takes the last "Coherence: <int>", "Consistency: <int>" and "Score: <int>"
// lines (case-insensitive, surrounding whitespace ignored). All three are
// required and must lie in [1, 10]. Throws JudgeParseError; never anything else.
ParsedScores parse_judge_reply(std::string_view text);

inline constexpr std::string_view kReformatInstruction = "Reply ONLY in the required format.";
// Re-prompts after a reply that does not parse.
inline constexpr int kParseRetries = 2;

struct JudgeContext {
  collab::PromptTemplate tmpl = collab::TemplateSet::defaults().judge;
  std::int64_t seed = 0;
  backend::ResponseCache* cache = nullptr;
};

// Attempt 0 is the plain rubric prompt; later attempts append the reformat
// instruction and use the attempt number as sample_index. Temperature 0.
backend::GenerationRequest judge_request(std::string_view query, std::string_view candidate,
                                         std::string_view ground_truth, const std::string& model,
                                         int attempt, const JudgeContext& ctx);

/// Scores one candidate against the ground truth, re-prompting up to
/// kParseRetries times. Throws JudgeParseError when every reply fails to
/// parse, PreconditionViolation on an empty candidate; backend errors pass
/// through.
EvalScore judge_output(backend::Backend& judge, std::string_view query,
                       std::string_view candidate, std::string_view ground_truth,
                       const JudgeContext& ctx);

// Reply text for a verdict, in the format parse_judge_reply accepts.
std::string format_judge_reply(int coherence, int consistency, int total);

// Audit line: example_id, stage, sample_index, the three scores and the
// SHA-256 of the raw reply.
Record audit_record(const std::string& example_id, std::string_view stage,
                    std::uint64_t sample_index, const EvalScore& score);

}  // namespace cowest::judge
