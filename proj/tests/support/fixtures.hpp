#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cowest/backend/backend.hpp"
#include "cowest/collab/templates.hpp"
#include "cowest/core/dataset.hpp"
#include "cowest/core/records.hpp"

namespace cowest::testing {

namespace fs = std::filesystem;

// Scripted behaviour for one example: the strong-only answer and its score,
// then one (draft, collaborative score) per sample index.
struct ScriptedExample {
  Example example;
  std::string strong_text;
  int e_strong = 5;
  std::vector<std::string> drafts;
  std::vector<int> e_collab;
};

// Fixture lines for the weak, strong and judge roles, keyed by prompt
// messages + sample_index so they are independent of model names and seeds.
struct ScriptLines {
  std::vector<Record> weak;
  std::vector<Record> strong;
  std::vector<Record> judge;
};

std::string refined_text(const std::string& draft);
ScriptLines script_lines(const std::vector<ScriptedExample>& examples,
                         const collab::TemplateSet& templates = collab::TemplateSet::defaults());

// In-memory scripted backend serving the given fixture lines.
std::unique_ptr<backend::ScriptedBackend> scripted(const std::vector<Record>& lines,
                                                   const std::string& model);

struct FixturePaths {
  fs::path dataset;
  fs::path weak;
  fs::path strong;
  fs::path judge;
  fs::path config;
};

// Writes dataset.jsonl, {weak,strong,judge}.jsonl and config.json into dir.
FixturePaths write_scripted_fixture(const fs::path& dir, const std::string& dataset_name,
                                    const std::vector<ScriptedExample>& examples,
                                    std::size_t k = 5, std::int64_t seed = 0);

// The two-example preference fixture: e_strong 5 with e_collab
// [7, 4, 6, 5, 3] and e_strong 6 with [6, 6, 8, 9, 2].
std::vector<ScriptedExample> golden_examples();

// n open-QA examples whose drafts alternate above and below the baseline.
std::vector<ScriptedExample> generated_examples(std::size_t n, std::size_t k = 5);

// Fresh empty directory under the system temp dir.
fs::path temp_dir(const std::string& tag);

}  // namespace cowest::testing
