#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cowest/backend/backend.hpp"
#include "cowest/backend/cache.hpp"
#include "cowest/collab/templates.hpp"
#include "cowest/core/dataset.hpp"
#include "cowest/core/records.hpp"

namespace cowest::collab {

enum class Stage { strong_only, weak_draft, refined };

std::string_view to_string(Stage stage) noexcept;

struct StageOutput {
  std::string example_id;
  Stage stage = Stage::strong_only;
  std::string text;
  std::uint64_t sample_index = 0;
  std::string digest;
  bool from_cache = false;
  // Set on a strong_only output produced because the weak draft failed.
  bool fallback = false;
};

/// One line per stage executed: example_id, stage, sample_index, digest,
/// from_cache, fallback. Safe for concurrent appends.
class RunLog {
 public:
  void append(const StageOutput& output);
  std::size_t fallback_count() const noexcept { return fallbacks_.load(); }
  // Sorted by (example_id, stage, sample_index) so concurrent runs log identically.
  std::vector<Record> records() const;

 private:
  mutable std::mutex mu_;
  std::vector<StageOutput> entries_;
  std::atomic<std::size_t> fallbacks_{0};
};

/// Shared settings for the generation stages.
struct PipelineContext {
  TemplateSet templates = TemplateSet::defaults();
  std::int64_t seed = 0;
  backend::ResponseCache* cache = nullptr;
  RunLog* log = nullptr;
  backend::Sampler strong_sampler = backend::kStrongSampler;
};

// Request builders; every prompt embeds the full query text.
backend::GenerationRequest strong_only_request(const Example& example, const std::string& model,
                                               const PipelineContext& ctx);
backend::GenerationRequest weak_draft_request(const Example& example, std::uint64_t sample_index,
                                              const backend::Sampler& sampler,
                                              const std::string& model, const PipelineContext& ctx);
backend::GenerationRequest refine_request(const Example& example, const std::string& draft_text,
                                          std::uint64_t sample_index, const std::string& model,
                                          const PipelineContext& ctx);

// The strong model's chain-of-thought answer to the bare query.
StageOutput strong_only(backend::Backend& strong, const Example& example,
                        const PipelineContext& ctx);

// Draft number `sample_index` of `sample_count`. Throws PreconditionViolation
// when sample_index >= sample_count.
StageOutput weak_draft(backend::Backend& weak, const Example& example, std::uint64_t sample_index,
                       std::uint64_t sample_count, const backend::Sampler& sampler,
                       const PipelineContext& ctx);

// Strong-model refinement of a weak draft; inherits the draft's sample_index.
StageOutput refine(backend::Backend& strong, const Example& example, const StageOutput& draft,
                   const PipelineContext& ctx);

/// Weak draft (sample 0, inference sampler) followed by strong refinement.
/// When the weak call fails the strong-only answer is returned instead with
/// `fallback` set, and the fallback is logged.
StageOutput collab_infer(backend::Backend& weak, backend::Backend& strong, const Example& example,
                         const PipelineContext& ctx,
                         const backend::Sampler& weak_sampler = backend::kWeakInferenceSampler);

// Text after the last line starting with "Answer:", trimmed; the whole
// trimmed text when no such line exists.
std::string extract_final_answer(std::string_view text);

StageOutput to_stage_output(const std::string& example_id, Stage stage, std::uint64_t sample_index,
                            const backend::Completion& completion);

}  // namespace cowest::collab
