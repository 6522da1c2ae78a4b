#include "cowest/collab/pipeline.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include "cowest/core/errors.hpp"

namespace cowest::collab {

using backend::GenerationRequest;
using backend::RoleTag;

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::strong_only: return "strong_only";
    case Stage::weak_draft: return "weak_draft";
    case Stage::refined: return "refined";
  }
  return "strong_only";
}

void RunLog::append(const StageOutput& output) {
  if (output.fallback) fallbacks_.fetch_add(1);
  std::lock_guard lock(mu_);
  entries_.push_back(output);
}

std::vector<Record> RunLog::records() const {
  std::vector<StageOutput> sorted;
  {
    std::lock_guard lock(mu_);
    sorted = entries_;
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const StageOutput& a, const StageOutput& b) {
    return std::tie(a.example_id, a.stage, a.sample_index) <
           std::tie(b.example_id, b.stage, b.sample_index);
  });
  std::vector<Record> out;
  for (const auto& e : sorted) {
    out.push_back({{"digest", e.digest},
                   {"example_id", e.example_id},
                   {"fallback", e.fallback},
                   {"from_cache", e.from_cache},
                   {"sample_index", e.sample_index},
                   {"stage", std::string(to_string(e.stage))}});
  }
  return out;
}

namespace {

GenerationRequest make_request(RoleTag role, const std::string& model,
                               std::vector<backend::Message> messages,
                               const backend::Sampler& sampler, std::uint64_t sample_index,
                               std::int64_t seed) {
  GenerationRequest r;
  r.role_tag = role;
  r.model = model;
  r.messages = std::move(messages);
  r.temperature = sampler.temperature;
  r.top_p = sampler.top_p;
  r.max_new_tokens = sampler.max_new_tokens;
  r.sample_index = sample_index;
  r.seed = seed;
  return r;
}

void log_output(const PipelineContext& ctx, const StageOutput& out) {
  if (ctx.log) ctx.log->append(out);
}

}  // namespace

StageOutput to_stage_output(const std::string& example_id, Stage stage, std::uint64_t sample_index,
                            const backend::Completion& c) {
  return StageOutput{example_id, stage, c.text, sample_index, c.request_digest, c.from_cache, false};
}

GenerationRequest strong_only_request(const Example& example, const std::string& model,
                                      const PipelineContext& ctx) {
  const auto& tmpl = ctx.templates.strong_cot;
  return make_request(RoleTag::strong, model, tmpl.expand(example_bindings(tmpl, example)),
                      ctx.strong_sampler, 0, ctx.seed);
}

GenerationRequest weak_draft_request(const Example& example, std::uint64_t sample_index,
                                     const backend::Sampler& sampler, const std::string& model,
                                     const PipelineContext& ctx) {
  const auto& tmpl = ctx.templates.weak_draft;
  return make_request(RoleTag::weak, model, tmpl.expand(example_bindings(tmpl, example)), sampler,
                      sample_index, ctx.seed);
}

GenerationRequest refine_request(const Example& example, const std::string& draft_text,
                                 std::uint64_t sample_index, const std::string& model,
                                 const PipelineContext& ctx) {
  const auto& tmpl = ctx.templates.refine;
  Bindings b = example_bindings(tmpl, example);
  b["draft"] = draft_text;
  return make_request(RoleTag::strong, model, tmpl.expand(b), ctx.strong_sampler, sample_index,
                      ctx.seed);
}

StageOutput strong_only(backend::Backend& strong, const Example& example,
                        const PipelineContext& ctx) {
  const auto request = strong_only_request(example, strong.model_id(), ctx);
  auto out = to_stage_output(example.id, Stage::strong_only, 0,
                             backend::cached_generate(strong, ctx.cache, request));
  log_output(ctx, out);
  return out;
}

StageOutput weak_draft(backend::Backend& weak, const Example& example, std::uint64_t sample_index,
                       std::uint64_t sample_count, const backend::Sampler& sampler,
                       const PipelineContext& ctx) {
  if (sample_index >= sample_count)
    throw PreconditionViolation("sample_index " + std::to_string(sample_index) +
                                " outside [0, " + std::to_string(sample_count) + ")");
  const auto request = weak_draft_request(example, sample_index, sampler, weak.model_id(), ctx);
  auto out = to_stage_output(example.id, Stage::weak_draft, sample_index,
                             backend::cached_generate(weak, ctx.cache, request));
  log_output(ctx, out);
  return out;
}

StageOutput refine(backend::Backend& strong, const Example& example, const StageOutput& draft,
                   const PipelineContext& ctx) {
  if (draft.stage != Stage::weak_draft)
    throw PreconditionViolation("refine expects a weak_draft, got " +
                                std::string(to_string(draft.stage)));
  const auto request =
      refine_request(example, draft.text, draft.sample_index, strong.model_id(), ctx);
  auto out = to_stage_output(example.id, Stage::refined, draft.sample_index,
                             backend::cached_generate(strong, ctx.cache, request));
  log_output(ctx, out);
  return out;
}

StageOutput collab_infer(backend::Backend& weak, backend::Backend& strong, const Example& example,
                         const PipelineContext& ctx, const backend::Sampler& weak_sampler) {
  StageOutput draft;
  try {
    draft = weak_draft(weak, example, 0, 1, weak_sampler, ctx);
  } catch (const BackendUnavailable&) {
    auto out = strong_only(strong, example, PipelineContext{ctx.templates, ctx.seed, ctx.cache,
                                                            nullptr, ctx.strong_sampler});
    out.fallback = true;
    log_output(ctx, out);
    return out;
  }
  return refine(strong, example, draft, ctx);
}

std::string extract_final_answer(std::string_view text) {
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  constexpr std::string_view kPrefix = "Answer:";
  std::optional<std::string_view> found;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    if (line.substr(0, kPrefix.size()) == kPrefix) found = trim(line.substr(kPrefix.size()));
    start = end + 1;
  }
  return std::string(found ? *found : trim(text));
}

}  // namespace cowest::collab
