#include "cowest/backend/cache.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "cowest/core/digest.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::backend {
namespace fs = std::filesystem;

namespace {

std::string payload_checksum(const std::string& request, const std::string& response) {
  return sha256_hex(request + '\n' + response);
}

}  // namespace

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoFailure(dir_.string(), ec.message());
}

fs::path ResponseCache::entry_path(const std::string& digest) const {
  return dir_ / digest.substr(0, 2) / digest;
}

std::mutex& ResponseCache::stripe(const std::string& digest) {
  return stripes_[std::hash<std::string>{}(digest) % stripes_.size()];
}

std::optional<std::string> ResponseCache::lookup(const std::string& digest) const {
  auto found = read_entry(digest);
  (found ? hits_ : misses_).fetch_add(1);
  return found;
}

std::optional<std::string> ResponseCache::read_entry(const std::string& digest) const {
  const fs::path path = entry_path(digest);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json entry;
  try {
    entry = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error&) {
    throw CacheCorrupt(digest, "unparseable entry");
  }
  if (!entry.is_object() || !entry.contains("checksum") || !entry.contains("request") ||
      !entry.contains("response") || !entry["checksum"].is_string() ||
      !entry["request"].is_string() || !entry["response"].is_string())
    throw CacheCorrupt(digest, "missing fields");
  const auto request = entry["request"].get<std::string>();
  auto response = entry["response"].get<std::string>();
  if (entry["checksum"].get<std::string>() != payload_checksum(request, response))
    throw CacheCorrupt(digest, "checksum mismatch");
  if (sha256_hex(request) != digest) throw CacheCorrupt(digest, "request does not hash to key");
  return response;
}

std::string ResponseCache::store(const GenerationRequest& request, const std::string& digest,
                                 const std::string& response) {
  std::lock_guard lock(stripe(digest));
  if (auto existing = read_entry(digest)) return *existing;
  const fs::path path = entry_path(digest);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoFailure(path.parent_path().string(), ec.message());

  const std::string canonical = canonical_form(request);
  nlohmann::json entry = {{"checksum", payload_checksum(canonical, response)},
                          {"request", canonical},
                          {"response", response}};
  std::ostringstream tmp_name;
  tmp_name << digest << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_line(entry) << '\n';
    out.flush();
    if (!out) throw IoFailure(tmp.string(), "cache write failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoFailure(path.string(), ec.message());
  return response;
}

Completion cached_generate(Backend& backend, ResponseCache* cache,
                           const GenerationRequest& request) {
  if (cache == nullptr) return backend.generate(request);
  validate(request);
  const std::string digest = request_digest(request);
  if (auto hit = cache->lookup(digest)) return Completion{std::move(*hit), digest, true, 0};
  Completion completion = backend.generate(request);
  completion.text = cache->store(request, digest, completion.text);
  return completion;
}

}  // namespace cowest::backend
