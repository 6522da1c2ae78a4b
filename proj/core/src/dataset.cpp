#include "cowest/core/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "cowest/core/errors.hpp"

namespace cowest {

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::open_qa: return "open_qa";
    case TaskKind::multiple_choice: return "multiple_choice";
    case TaskKind::classification: return "classification";
  }
  return "open_qa";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) noexcept {
  if (text == "open_qa") return TaskKind::open_qa;
  if (text == "multiple_choice") return TaskKind::multiple_choice;
  if (text == "classification") return TaskKind::classification;
  return std::nullopt;
}

void validate_example(const Example& ex) {
  if (ex.id.empty()) throw ConstraintViolation(ex.id, "id must be nonempty");
  switch (ex.task_kind) {
    case TaskKind::multiple_choice: {
      if (!ex.choices || ex.choices->empty())
        throw ConstraintViolation(ex.id, "multiple_choice requires nonempty choices");
      const bool found = std::any_of(ex.choices->begin(), ex.choices->end(),
                                     [&](const Choice& c) { return c.label == ex.ground_truth; });
      if (!found)
        throw ConstraintViolation(ex.id,
                                  "ground_truth \"" + ex.ground_truth + "\" is not a choice label");
      break;
    }
    case TaskKind::classification: {
      if (!ex.label_set || ex.label_set->empty())
        throw ConstraintViolation(ex.id, "classification requires nonempty label_set");
      if (std::find(ex.label_set->begin(), ex.label_set->end(), ex.ground_truth) ==
          ex.label_set->end())
        throw ConstraintViolation(ex.id,
                                  "ground_truth \"" + ex.ground_truth + "\" not in label_set");
      break;
    }
    case TaskKind::open_qa:
      break;
  }
}

Record to_record(const Example& ex) {
  Record r = Record::object();
  r["id"] = ex.id;
  r["query"] = ex.query;
  r["ground_truth"] = ex.ground_truth;
  r["task_kind"] = std::string(to_string(ex.task_kind));
  if (ex.choices) {
    Record arr = Record::array();
    for (const auto& c : *ex.choices) arr.push_back({{"label", c.label}, {"text", c.text}});
    r["choices"] = std::move(arr);
  }
  if (ex.label_set) r["label_set"] = *ex.label_set;
  return r;
}

namespace {

std::string require_string(const Record& r, const char* field, std::size_t line_no) {
  auto it = r.find(field);
  if (it == r.end() || !it->is_string())
    throw MalformedRecord(line_no, std::string("field \"") + field + "\" missing or not a string");
  return it->get<std::string>();
}

}  // namespace

Example example_from_record(const Record& r, std::size_t line_no) {
  Example ex;
  ex.id = require_string(r, "id", line_no);
  ex.query = require_string(r, "query", line_no);
  ex.ground_truth = require_string(r, "ground_truth", line_no);
  const auto kind = parse_task_kind(require_string(r, "task_kind", line_no));
  if (!kind) throw MalformedRecord(line_no, "unknown task_kind");
  ex.task_kind = *kind;

  if (auto it = r.find("choices"); it != r.end() && !it->is_null()) {
    if (!it->is_array()) throw MalformedRecord(line_no, "choices must be an array");
    std::vector<Choice> choices;
    for (const auto& c : *it) {
      if (!c.is_object()) throw MalformedRecord(line_no, "choice must be an object");
      choices.push_back({require_string(c, "label", line_no), require_string(c, "text", line_no)});
    }
    ex.choices = std::move(choices);
  }
  if (auto it = r.find("label_set"); it != r.end() && !it->is_null()) {
    if (!it->is_array()) throw MalformedRecord(line_no, "label_set must be an array");
    std::vector<std::string> labels;
    for (const auto& l : *it) {
      if (!l.is_string()) throw MalformedRecord(line_no, "label_set entries must be strings");
      labels.push_back(l.get<std::string>());
    }
    ex.label_set = std::move(labels);
  }
  return ex;
}

Dataset load_dataset(const std::filesystem::path& path) {
  // read_records skips blank lines, so line numbers are recovered here.
  const std::string content = read_text_file(path);
  Dataset ds;
  ds.name = path.stem().string();
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Record rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(line_no, e.what());
    }
    if (!rec.is_object()) throw MalformedRecord(line_no, "record is not an object");
    Example ex = example_from_record(rec, line_no);
    if (!seen.insert(ex.id).second) throw DuplicateId(ex.id);
    validate_example(ex);
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::vector<Record> records;
  records.reserve(dataset.examples.size());
  for (const auto& ex : dataset.examples) records.push_back(to_record(ex));
  write_records(path, records);
}

}  // namespace cowest
