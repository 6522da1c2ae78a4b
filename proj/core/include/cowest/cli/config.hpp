#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cowest/core/records.hpp"

namespace cowest::cli {

namespace fs = std::filesystem;

struct BackendSpec {
  std::string kind;  // scripted | http | toy
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<fs::path> fixture;   // scripted
  std::optional<fs::path> universe;  // toy
  std::optional<fs::path> policy;    // toy weak: policy records; uniform when absent
};

struct SamplingConfig {
  std::size_t k = 5;
  double temperature = 1.0;
  double top_p = 0.9;
  std::int64_t max_new_tokens = 1028;
  double inference_temperature = 0.2;
};

struct AlignmentConfig {
  double alpha = 0.1;
  double lr = 0.5;
  std::size_t steps = 2000;
  double epsilon = 1e-3;
  double sft_lr = 0.1;
  std::size_t sft_steps = 100;
};

struct LimitsConfig {
  std::size_t max_in_flight = 8;
  std::optional<std::size_t> max_requests;
  int retries = 5;
  std::int64_t backoff_ms = 500;
};

/// Effective configuration of one run. Relative paths in the file resolve
/// against the directory holding the config file.
struct RunConfig {
  std::optional<fs::path> dataset;
  std::optional<fs::path> eval_dataset;
  std::optional<fs::path> templates_dir;
  BackendSpec weak;
  BackendSpec strong;
  std::optional<BackendSpec> judge;  // defaults to the strong backend
  SamplingConfig sampling;
  AlignmentConfig alignment;
  LimitsConfig limits;
  std::optional<fs::path> cache_dir;
  std::int64_t seed = 0;
  fs::path output_dir = "runs";

  const BackendSpec& judge_spec() const { return judge ? *judge : strong; }

  Record to_record() const;
  // First 12 hex chars of SHA-256 over the effective config and the seed.
  std::string run_id() const;
  fs::path run_dir() const { return output_dir / run_id(); }
};

enum class Command { infer, build_prefs, train_toy };

// Throws ConfigError naming the offending field.
RunConfig parse_config(const Record& doc, const fs::path& base_dir);
RunConfig load_config(const fs::path& path);

// Checks what `command` needs: required fields present, referenced paths
// exist, K >= 1, alpha > 0, max_in_flight >= 1.
void validate_for(const RunConfig& config, Command command);

}  // namespace cowest::cli
