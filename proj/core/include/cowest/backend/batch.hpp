#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cowest/backend/backend.hpp"
#include "cowest/backend/cache.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::backend {

struct ItemError {
  ErrorCode code;
  std::string message;
};

using BatchResult = std::variant<Completion, ItemError>;

inline bool ok(const BatchResult& r) noexcept { return std::holds_alternative<Completion>(r); }

/// Runs every request through cached_generate with at most `max_in_flight`
/// outstanding at once. Results come back in input order; failures land in
/// their own slot. A cache write failure aborts the batch with BatchAborted
/// once in-flight work has drained.
std::vector<BatchResult> run_batch(Backend& backend, ResponseCache* cache,
                                   std::span<const GenerationRequest> requests,
                                   std::size_t max_in_flight);

}  // namespace cowest::backend
