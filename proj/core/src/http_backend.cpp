#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "cowest/backend/backend.hpp"
#include "cowest/backend/prng.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::backend {

struct HttpBackend::Endpoint {
  std::string scheme_host_port;
  std::string path;
};

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, double unit_draw) {
  const double factor = 1.0 + policy.jitter * (2.0 * unit_draw - 1.0);
  const double ms =
      static_cast<double>(policy.base_delay.count()) * static_cast<double>(1LL << retry) * factor;
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

std::string api_key_from_environment() {
  const char* key = std::getenv("COWEST_API_KEY");
  return key ? std::string(key) : std::string();
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const std::string& url = options_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidRequest("base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  endpoint_ = std::make_unique<Endpoint>();
  endpoint_->scheme_host_port = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  endpoint_->path = prefix + "/chat/completions";
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::request_body(const GenerationRequest& request) const {
  Record body = Record::object();
  body["model"] = options_.model;
  Record messages = Record::array();
  for (const auto& m : request.messages)
    messages.push_back({{"role", std::string(to_string(m.speaker))}, {"content", m.text}});
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  if (request.max_new_tokens) body["max_tokens"] = *request.max_new_tokens;
  // Distinct draws of the same prompt must not share a provider-side seed.
  body["seed"] = static_cast<std::int64_t>(derive_seed(request.seed, request.sample_index));
  return to_line(body);
}

std::string HttpBackend::complete(const GenerationRequest& request, const std::string& digest) {
  const std::string body = request_body(request);
  httplib::Headers headers;
  if (!options_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + options_.api_key);

  thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::string last_error;
  for (int attempt = 0; attempt < options_.retry.max_attempts; ++attempt) {
    if (attempt > 0) {
      retries_.fetch_add(1);
      std::this_thread::sleep_for(backoff_delay(options_.retry, attempt - 1, unit(jitter_rng)));
    }
    attempts_.fetch_add(1);

    httplib::Client client(endpoint_->scheme_host_port);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(endpoint_->path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status >= 200 && status < 300) {
      try {
        const auto reply = nlohmann::json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable("unparseable reply for " + digest + ": " + e.what());
      }
    }
    last_error = "HTTP " + std::to_string(status);
    if (status != 429 && status < 500) break;
  }
  throw BackendUnavailable(last_error + " for " + digest);
}

}  // namespace cowest::backend
