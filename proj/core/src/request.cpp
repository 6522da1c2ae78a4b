#include "cowest/backend/request.hpp"

#include <cmath>

#include "cowest/core/digest.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::backend {

std::string_view to_string(RoleTag role) noexcept {
  switch (role) {
    case RoleTag::weak: return "weak";
    case RoleTag::strong: return "strong";
    case RoleTag::judge: return "judge";
  }
  return "weak";
}

std::string_view to_string(Speaker speaker) noexcept {
  switch (speaker) {
    case Speaker::system: return "system";
    case Speaker::user: return "user";
    case Speaker::assistant: return "assistant";
  }
  return "user";
}

std::optional<Speaker> parse_speaker(std::string_view text) noexcept {
  if (text == "system") return Speaker::system;
  if (text == "user") return Speaker::user;
  if (text == "assistant") return Speaker::assistant;
  return std::nullopt;
}

void validate(const GenerationRequest& r) {
  if (r.messages.empty()) throw InvalidRequest("messages must be nonempty");
  if (r.messages.back().speaker != Speaker::user)
    throw InvalidRequest("last message must come from the user");
  if (!std::isfinite(r.temperature) || r.temperature < 0.0)
    throw InvalidRequest("temperature must be >= 0");
  if (!std::isfinite(r.top_p) || r.top_p <= 0.0 || r.top_p > 1.0)
    throw InvalidRequest("top_p must lie in (0, 1]");
  if (r.max_new_tokens && *r.max_new_tokens <= 0)
    throw InvalidRequest("max_new_tokens must be positive");
}

Record messages_record(const std::vector<Message>& messages) {
  Record arr = Record::array();
  for (const auto& m : messages)
    arr.push_back({{"speaker", std::string(to_string(m.speaker))}, {"text", m.text}});
  return arr;
}

std::vector<Message> messages_from_record(const Record& record) {
  if (!record.is_array()) throw InvalidRequest("messages must be an array");
  std::vector<Message> out;
  for (const auto& m : record) {
    if (!m.is_object() || !m.contains("speaker") || !m.contains("text") ||
        !m["speaker"].is_string() || !m["text"].is_string())
      throw InvalidRequest("message needs string fields speaker and text");
    auto speaker = parse_speaker(m["speaker"].get<std::string>());
    if (!speaker) throw InvalidRequest("unknown speaker " + m["speaker"].get<std::string>());
    out.push_back({*speaker, m["text"].get<std::string>()});
  }
  return out;
}

std::string canonical_form(const GenerationRequest& r) {
  Record rec = Record::object();
  if (r.max_new_tokens) rec["max_new_tokens"] = *r.max_new_tokens;
  rec["messages"] = messages_record(r.messages);
  rec["model"] = r.model;
  rec["role_tag"] = std::string(to_string(r.role_tag));
  rec["sample_index"] = r.sample_index;
  rec["seed"] = r.seed;
  rec["temperature"] = r.temperature;
  rec["top_p"] = r.top_p;
  return to_line(rec);
}

std::string request_digest(const GenerationRequest& request) {
  return sha256_hex(canonical_form(request));
}

}  // namespace cowest::backend
