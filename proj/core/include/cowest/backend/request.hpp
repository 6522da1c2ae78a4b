#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cowest/core/records.hpp"

namespace cowest::backend {

enum class RoleTag { weak, strong, judge };
enum class Speaker { system, user, assistant };

std::string_view to_string(RoleTag role) noexcept;
std::string_view to_string(Speaker speaker) noexcept;
std::optional<Speaker> parse_speaker(std::string_view text) noexcept;

struct Message {
  Speaker speaker = Speaker::user;
  std::string text;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Everything that determines a model call. `sample_index` separates the K
/// draws taken for the same prompt; `model` names the backend identity so
/// cache entries from different models never collide.
struct GenerationRequest {
  RoleTag role_tag = RoleTag::weak;
  std::string model;
  std::vector<Message> messages;
  double temperature = 1.0;
  double top_p = 1.0;
  std::optional<std::int64_t> max_new_tokens;
  std::uint64_t sample_index = 0;
  std::int64_t seed = 0;

  friend bool operator==(const GenerationRequest&, const GenerationRequest&) = default;
};

// Throws InvalidRequest.
void validate(const GenerationRequest& request);

Record messages_record(const std::vector<Message>& messages);
std::vector<Message> messages_from_record(const Record& record);

// Sorted-key compact JSON; the byte string the digest is taken over.
std::string canonical_form(const GenerationRequest& request);
std::string request_digest(const GenerationRequest& request);

struct Completion {
  std::string text;
  std::string request_digest;
  bool from_cache = false;
  std::int64_t latency_ms = 0;
};

/// Sampler settings for a single call.
struct Sampler {
  double temperature = 1.0;
  double top_p = 1.0;
  std::optional<std::int64_t> max_new_tokens;
};

// Weak-model training draws: temperature 1.0, top_p 0.9, max_new_tokens 1028.
inline constexpr Sampler kWeakTrainingSampler{1.0, 0.9, 1028};
// Near-greedy weak draft used at inference time.
inline constexpr Sampler kWeakInferenceSampler{0.2, 0.9, 1028};
// Strong model: temperature 1, no token limit.
inline constexpr Sampler kStrongSampler{1.0, 1.0, std::nullopt};
inline constexpr Sampler kJudgeSampler{0.0, 1.0, std::nullopt};

}  // namespace cowest::backend
