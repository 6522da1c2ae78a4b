#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "cowest/backend/backend.hpp"
#include "cowest/backend/request.hpp"

namespace cowest::backend {

/// Content-addressed response store. Entry layout:
///   {dir}/{digest[0:2]}/{digest}
/// holding one JSON line {checksum, request, response}, where checksum is the
/// SHA-256 of request + '\n' + response. Readers run concurrently; writers are
/// serialized per digest and the first persisted response wins.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path entry_path(const std::string& digest) const;

  // nullopt on miss. Throws CacheCorrupt when the entry fails verification.
  std::optional<std::string> lookup(const std::string& digest) const;

  // Throws IoFailure. Returns the text now stored under the digest, which is
  // the existing entry's when another writer got there first.
  std::string store(const GenerationRequest& request, const std::string& digest,
                    const std::string& response);

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  std::mutex& stripe(const std::string& digest);
  std::optional<std::string> read_entry(const std::string& digest) const;

  std::filesystem::path dir_;
  std::array<std::mutex, 64> stripes_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

// Cache-through generation: a hit returns the stored text with from_cache set
// and makes no backend call. `cache` may be null.
Completion cached_generate(Backend& backend, ResponseCache* cache,
                           const GenerationRequest& request);

}  // namespace cowest::backend
