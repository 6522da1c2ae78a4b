#include "cowest/backend/backend.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::backend {

std::string ScriptedBackend::messages_key(const std::vector<Message>& messages,
                                          std::uint64_t sample_index) {
  return to_line(messages_record(messages)) + "#" + std::to_string(sample_index);
}

void ScriptedBackend::add_by_digest(const std::string& digest, std::string text) {
  by_digest_[digest] = Entry{std::move(text), false};
}

void ScriptedBackend::add_by_messages(const std::vector<Message>& messages,
                                      std::uint64_t sample_index, std::string text) {
  by_messages_[messages_key(messages, sample_index)] = Entry{std::move(text), false};
}

void ScriptedBackend::add_failure_by_messages(const std::vector<Message>& messages,
                                              std::uint64_t sample_index) {
  by_messages_[messages_key(messages, sample_index)] = Entry{{}, true};
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path,
                                                            std::string model) {
  auto backend = std::make_unique<ScriptedBackend>(std::move(model));
  const auto records = read_records(path);
  std::size_t n = 0;
  for (const auto& r : records) {
    ++n;
    const bool fail = r.contains("error");
    if (!fail && !(r.contains("text") && r["text"].is_string()))
      throw MalformedRecord(n, "fixture entry needs a string \"text\" or an \"error\"");
    Entry entry{fail ? std::string{} : r["text"].get<std::string>(), fail};
    if (r.contains("digest")) {
      if (!r["digest"].is_string()) throw MalformedRecord(n, "digest must be a string");
      backend->by_digest_[r["digest"].get<std::string>()] = std::move(entry);
    } else if (r.contains("messages")) {
      const std::uint64_t index = r.value("sample_index", std::uint64_t{0});
      try {
        backend->by_messages_[messages_key(messages_from_record(r["messages"]), index)] =
            std::move(entry);
      } catch (const InvalidRequest& e) {
        throw MalformedRecord(n, e.what());
      }
    } else {
      throw MalformedRecord(n, "fixture entry needs \"digest\" or \"messages\"");
    }
  }
  return backend;
}

std::string ScriptedBackend::complete(const GenerationRequest& request, const std::string& digest) {
  const Entry* entry = nullptr;
  if (auto it = by_digest_.find(digest); it != by_digest_.end()) {
    entry = &it->second;
  } else if (auto jt = by_messages_.find(messages_key(request.messages, request.sample_index));
             jt != by_messages_.end()) {
    entry = &jt->second;
  }
  if (!entry) throw FixtureMiss(digest);
  if (entry->fail) throw BackendUnavailable("scripted outage for " + digest);
  return entry->text;
}

}  // namespace cowest::backend
