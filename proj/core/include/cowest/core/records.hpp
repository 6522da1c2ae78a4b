#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cowest {

// A flat record. nlohmann::json objects keep keys sorted, which gives the
// fixed alphabetical field order the emitted files rely on.
using Record = nlohmann::json;

// Compact single-line serialization with sorted keys and no insignificant
// whitespace. Invalid UTF-8 is replaced rather than rejected.
std::string to_line(const Record& record);

// One record per line. Parent directories are created. Throws IoFailure.
void write_records(const std::filesystem::path& path, std::span<const Record> records);

// Blank lines are skipped. Throws IoFailure or MalformedRecord (1-based line).
std::vector<Record> read_records(const std::filesystem::path& path);

// Whole-file helpers used for configs, sidecars and reports.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cowest
