#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cowest/core/records.hpp"

namespace cowest {

enum class TaskKind { open_qa, multiple_choice, classification };

std::string_view to_string(TaskKind kind) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view text) noexcept;

struct Choice {
  std::string label;
  std::string text;

  friend bool operator==(const Choice&, const Choice&) = default;
};

/// One task instance: the query, its reference answer, and for closed-form
/// tasks the admissible answers.
struct Example {
  std::string id;
  std::string query;
  std::string ground_truth;
  TaskKind task_kind = TaskKind::open_qa;
  std::optional<std::vector<Choice>> choices;
  std::optional<std::vector<std::string>> label_set;

  friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
  std::string name;
  std::vector<Example> examples;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Throws ConstraintViolation when an Example invariant does not hold.
void validate_example(const Example& example);

Record to_record(const Example& example);
// Throws MalformedRecord (with line_no) on missing or mistyped fields.
Example example_from_record(const Record& record, std::size_t line_no = 0);

/// Loads a line-delimited dataset file, preserving line order. The dataset
/// name is the file stem.
///
/// Throws MalformedRecord, DuplicateId or ConstraintViolation.
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace cowest
