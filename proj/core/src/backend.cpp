#include "cowest/backend/backend.hpp"

#include "cowest/core/errors.hpp"

namespace cowest::backend {

void RequestBudget::consume() {
  if (!limit_) {
    used_.fetch_add(1);
    return;
  }
  std::size_t current = used_.load();
  do {
    if (current >= *limit_) throw BudgetExceeded(*limit_);
  } while (!used_.compare_exchange_weak(current, current + 1));
}

Completion Backend::generate(const GenerationRequest& request) {
  validate(request);
  const std::string digest = request_digest(request);
  if (budget_) budget_->consume();
  calls_.fetch_add(1);
  const auto start = std::chrono::steady_clock::now();
  std::string text = complete(request, digest);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return Completion{std::move(text), digest, false, elapsed.count()};
}

}  // namespace cowest::backend
