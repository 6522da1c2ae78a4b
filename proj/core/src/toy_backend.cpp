#include "cowest/backend/toy_backend.hpp"

#include "cowest/backend/prng.hpp"
#include "cowest/collab/templates.hpp"
#include "cowest/core/digest.hpp"
#include "cowest/core/errors.hpp"
#include "cowest/judge/judge.hpp"

namespace cowest::backend {
namespace {

const std::string& last_user_text(const GenerationRequest& r) { return r.messages.back().text; }

std::size_t locate_or_throw(const toyalign::ToyUniverse& u, std::string_view text) {
  auto c = u.locate(text);
  if (!c) throw BackendUnavailable("toy backend: prompt matches no context query");
  return *c;
}

// Longest vocab entry of the context occurring in `text`.
std::optional<std::size_t> find_entry(const toyalign::ToyContext& ctx, std::string_view text) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < ctx.vocab.size(); ++i) {
    if (text.find(ctx.vocab[i]) == std::string_view::npos) continue;
    if (!best || ctx.vocab[i].size() > ctx.vocab[*best].size()) best = i;
  }
  return best;
}

}  // namespace

ToyWeakBackend::ToyWeakBackend(std::shared_ptr<const toyalign::ToyUniverse> universe,
                               toyalign::ToyPolicy policy)
    : universe_(std::move(universe)), policy_(std::move(policy)) {
  if (policy_.contexts() != universe_->size())
    throw PreconditionViolation("policy and universe disagree on context count");
  model_id_ = "toy-policy:" + sha256_hex(to_line(nlohmann::json(policy_.logits))).substr(0, 16);
}

std::string ToyWeakBackend::complete(const GenerationRequest& request, const std::string& digest) {
  const std::size_t c = locate_or_throw(*universe_, last_user_text(request));
  // Mixing in the prompt digest keeps draws independent across contexts.
  SplitMix64 rng(derive_seed(request.seed, request.sample_index) ^
                 std::stoull(digest.substr(0, 16), nullptr, 16));
  const std::size_t index = sample_index_from_logits(policy_.logits[c], request.temperature,
                                                     request.top_p, rng);
  return universe_->contexts[c].vocab[index];
}

ToyStrongBackend::ToyStrongBackend(std::shared_ptr<const toyalign::ToyUniverse> universe)
    : universe_(std::move(universe)) {}

std::string ToyStrongBackend::complete(const GenerationRequest& request, const std::string&) {
  const std::string& text = last_user_text(request);
  const std::size_t c = locate_or_throw(*universe_, text);
  const auto header = text.find(collab::kDraftHeader);
  if (header != std::string::npos) {
    const auto draft = std::string_view(text).substr(header + collab::kDraftHeader.size());
    if (auto i = find_entry(universe_->contexts[c], draft))
      return "Answer: " + universe_->contexts[c].vocab[*i];
  }
  return "Answer: " + std::string(kToyBaselineAnswer);
}

ToyJudgeBackend::ToyJudgeBackend(std::shared_ptr<const toyalign::ToyUniverse> universe)
    : universe_(std::move(universe)) {}

std::string ToyJudgeBackend::complete(const GenerationRequest& request, const std::string&) {
  const std::string_view text = last_user_text(request);
  const std::size_t c = locate_or_throw(*universe_, text);
  const auto& ctx = universe_->contexts[c];
  const auto begin = text.find(collab::kCandidateHeader);
  const auto end = text.find(collab::kGroundTruthHeader, begin == std::string_view::npos ? 0 : begin);
  if (begin == std::string_view::npos || end == std::string_view::npos)
    return "I cannot grade this.";
  const auto candidate = text.substr(begin + collab::kCandidateHeader.size(),
                                     end - begin - collab::kCandidateHeader.size());
  int score = ctx.baseline;
  if (candidate.find(kToyBaselineAnswer) == std::string_view::npos) {
    const auto i = find_entry(ctx, candidate);
    score = i ? ctx.quality[*i] : 1;
  }
  return judge::format_judge_reply(score, score, score);
}

}  // namespace cowest::backend
