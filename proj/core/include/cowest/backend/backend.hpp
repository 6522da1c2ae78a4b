#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "cowest/backend/request.hpp"

namespace cowest::backend {

// Per-run ceiling on backend calls, shared by every backend of the run.
// Cache hits never consume budget.
class RequestBudget {
 public:
  explicit RequestBudget(std::optional<std::size_t> limit = std::nullopt) : limit_(limit) {}

  // Throws BudgetExceeded when the limit is already spent.
  void consume();
  std::size_t used() const noexcept { return used_.load(); }
  std::optional<std::size_t> limit() const noexcept { return limit_; }

 private:
  std::optional<std::size_t> limit_;
  std::atomic<std::size_t> used_{0};
};

/// Text-generation backend. `generate` validates the request, charges the
/// budget, counts the call and times it; subclasses implement `complete`.
/// Implementations must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;

  Completion generate(const GenerationRequest& request);

  virtual std::string model_id() const = 0;

  std::size_t call_count() const noexcept { return calls_.load(); }
  void reset_call_count() noexcept { calls_.store(0); }
  void set_budget(std::shared_ptr<RequestBudget> budget) { budget_ = std::move(budget); }

 protected:
  virtual std::string complete(const GenerationRequest& request, const std::string& digest) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
  std::shared_ptr<RequestBudget> budget_;
};

/// Table-driven backend. Entries are matched by request digest first, then by
/// (messages, sample_index). Fixture files hold one entry per line:
///   {"digest": "<hex>", "text": "..."}
///   {"messages": [{"speaker": "user", "text": "..."}], "sample_index": 0, "text": "..."}
/// An entry may carry "error": "unavailable" instead of "text" to simulate an
/// outage for that request.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::string model = "scripted") : model_(std::move(model)) {}

  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path,
                                                    std::string model = "scripted");

  void add_by_digest(const std::string& digest, std::string text);
  void add_by_messages(const std::vector<Message>& messages, std::uint64_t sample_index,
                       std::string text);
  void add_failure_by_messages(const std::vector<Message>& messages, std::uint64_t sample_index);

  std::string model_id() const override { return model_; }

 protected:
  std::string complete(const GenerationRequest& request, const std::string& digest) override;

 private:
  struct Entry {
    std::string text;
    bool fail = false;
  };
  static std::string messages_key(const std::vector<Message>& messages, std::uint64_t sample_index);

  std::string model_;
  std::unordered_map<std::string, Entry> by_digest_;
  std::unordered_map<std::string, Entry> by_messages_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  double jitter = 0.2;
};

// Backoff before retry number `retry` (0-based): base * 2^retry scaled by a
// factor drawn uniformly from [1 - jitter, 1 + jitter].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, double unit_draw);

struct HttpBackendOptions {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model;
  std::string api_key;   // sent as a bearer token when nonempty
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
};

/// Chat-completions client: POST {base_url}/chat/completions, reply text from
/// choices[0].message.content. Transport errors, 429 and 5xx are retried with
/// exponential backoff; any other non-2xx fails immediately.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  std::string model_id() const override { return options_.model; }

  std::size_t attempt_count() const noexcept { return attempts_.load(); }
  std::size_t retry_count() const noexcept { return retries_.load(); }

  // Request body for the wire; exposed for tests.
  std::string request_body(const GenerationRequest& request) const;

 protected:
  std::string complete(const GenerationRequest& request, const std::string& digest) override;

 private:
  struct Endpoint;
  HttpBackendOptions options_;
  std::unique_ptr<Endpoint> endpoint_;
  std::atomic<std::size_t> attempts_{0};
  std::atomic<std::size_t> retries_{0};
};

// Reads COWEST_API_KEY; empty when unset.
std::string api_key_from_environment();

}  // namespace cowest::backend
