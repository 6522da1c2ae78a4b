#include "cowest/backend/batch.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

namespace cowest::backend {

std::vector<BatchResult> run_batch(Backend& backend, ResponseCache* cache,
                                   std::span<const GenerationRequest> requests,
                                   std::size_t max_in_flight) {
  if (max_in_flight == 0) throw PreconditionViolation("max_in_flight must be >= 1");
  std::vector<BatchResult> results(requests.size(), ItemError{ErrorCode::batch_aborted, "not run"});
  std::atomic<std::size_t> next{0};
  std::atomic<bool> aborted{false};
  std::mutex abort_mu;
  std::optional<std::string> abort_reason;

  auto worker = [&] {
    for (;;) {
      if (aborted.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        results[i] = cached_generate(backend, cache, requests[i]);
      } catch (const IoFailure& e) {
        results[i] = ItemError{e.code(), e.what()};
        std::lock_guard lock(abort_mu);
        if (!abort_reason) abort_reason = e.what();
        aborted.store(true);
      } catch (const Error& e) {
        results[i] = ItemError{e.code(), e.what()};
      } catch (const std::exception& e) {
        results[i] = ItemError{ErrorCode::backend_unavailable, e.what()};
      }
    }
  };

  const std::size_t workers = std::min(max_in_flight, requests.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (abort_reason) throw BatchAborted(*abort_reason);
  return results;
}

}  // namespace cowest::backend
