#include "cowest/judge/judge.hpp"

#include <cctype>
#include <charconv>
#include <optional>

#include "cowest/core/digest.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::judge {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// Value of "<key>: <int>" with nothing else on the line; nullopt otherwise.
// Integers too large for long long saturate so they still fail the range check.
std::optional<long long> field_value(std::string_view line, std::string_view key) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  if (!iequals(trim(line.substr(0, colon)), key)) return std::nullopt;
  auto value = trim(line.substr(colon + 1));
  if (value.empty()) return std::nullopt;
  bool negative = false;
  if (value.front() == '+' || value.front() == '-') {
    negative = value.front() == '-';
    value.remove_prefix(1);
  }
  if (value.empty()) return std::nullopt;
  for (char c : value)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec == std::errc::result_out_of_range) v = 1000;
  (void)ptr;
  return negative ? -v : v;
}

}  // namespace

ParsedScores parse_judge_reply(std::string_view text) {
  std::optional<long long> coherence, consistency, total;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    if (auto v = field_value(line, "Coherence")) coherence = v;
    if (auto v = field_value(line, "Consistency")) consistency = v;
    if (auto v = field_value(line, "Score")) total = v;
    start = end + 1;
  }
  auto check = [](const std::optional<long long>& v, const char* name) {
    if (!v) throw JudgeParseError(JudgeParseFailure::missing_field, std::string("no ") + name + " line");
    if (*v < 1 || *v > 10)
      throw JudgeParseError(JudgeParseFailure::out_of_range,
                            std::string(name) + " " + std::to_string(*v) + " outside [1, 10]");
    return static_cast<int>(*v);
  };
  ParsedScores s;
  s.coherence = check(coherence, "Coherence");
  s.consistency = check(consistency, "Consistency");
  s.total = check(total, "Score");
  return s;
}

backend::GenerationRequest judge_request(std::string_view query, std::string_view candidate,
                                         std::string_view ground_truth, const std::string& model,
                                         int attempt, const JudgeContext& ctx) {
  collab::Bindings b;
  b["query"] = std::string(query);
  b["candidate"] = std::string(candidate);
  b["ground_truth"] = std::string(ground_truth);
  backend::GenerationRequest r;
  r.role_tag = backend::RoleTag::judge;
  r.model = model;
  r.messages = ctx.tmpl.expand(b);
  if (attempt > 0) r.messages.back().text += "\n\n" + std::string(kReformatInstruction);
  r.temperature = backend::kJudgeSampler.temperature;
  r.top_p = backend::kJudgeSampler.top_p;
  r.max_new_tokens = backend::kJudgeSampler.max_new_tokens;
  r.sample_index = static_cast<std::uint64_t>(attempt);
  r.seed = ctx.seed;
  return r;
}

EvalScore judge_output(backend::Backend& judge, std::string_view query,
                       std::string_view candidate, std::string_view ground_truth,
                       const JudgeContext& ctx) {
  if (candidate.empty()) throw PreconditionViolation("empty candidate text");
  std::optional<JudgeParseError> last;
  for (int attempt = 0; attempt <= kParseRetries; ++attempt) {
    const auto request = judge_request(query, candidate, ground_truth, judge.model_id(), attempt, ctx);
    const auto completion = backend::cached_generate(judge, ctx.cache, request);
    try {
      const auto s = parse_judge_reply(completion.text);
      return EvalScore{s.coherence, s.consistency, s.total, completion.text};
    } catch (const JudgeParseError& e) {
      last = e;
    }
  }
  throw *last;
}

std::string format_judge_reply(int coherence, int consistency, int total) {
  return "Coherence: " + std::to_string(coherence) + "\nConsistency: " +
         std::to_string(consistency) + "\nScore: " + std::to_string(total);
}

Record audit_record(const std::string& example_id, std::string_view stage,
                    std::uint64_t sample_index, const EvalScore& score) {
  return {{"coherence", score.coherence},
          {"consistency", score.consistency},
          {"example_id", example_id},
          {"raw_reply_digest", sha256_hex(score.raw_reply)},
          {"sample_index", sample_index},
          {"stage", std::string(stage)},
          {"total", score.total}};
}

}  // namespace cowest::judge
