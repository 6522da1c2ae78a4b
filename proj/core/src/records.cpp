#include "cowest/core/records.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "cowest/core/errors.hpp"

namespace cowest {
namespace fs = std::filesystem;

std::string to_line(const Record& record) {
  return record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoFailure(path.string(), ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path.string(), "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoFailure(path.string(), "write failed");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoFailure(path.string(), "read failed");
  return buf.str();
}

void write_records(const fs::path& path, std::span<const Record> records) {
  std::string content;
  for (const auto& r : records) {
    content += to_line(r);
    content.push_back('\n');
  }
  write_text_file(path, content);
}

std::vector<Record> read_records(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path.string(), "cannot open for reading");
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      if (!rec.is_object()) throw MalformedRecord(line_no, "record is not an object");
      out.push_back(std::move(rec));
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  if (in.bad()) throw IoFailure(path.string(), "read failed");
  return out;
}

}  // namespace cowest
