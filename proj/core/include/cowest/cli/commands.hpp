#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cowest/backend/backend.hpp"
#include "cowest/cli/config.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitDivergence = 4;

int exit_code_for(ErrorCode code) noexcept;

// {"error": <code>, "message": ..., "field"/"path" when known} on one line.
std::string error_line(const Error& error);

struct CommandOutcome {
  int exit_code = kExitOk;
  fs::path run_dir;
  std::size_t weak_calls = 0;
  std::size_t strong_calls = 0;
  std::size_t judge_calls = 0;
};

enum class Role { weak, strong, judge };

std::unique_ptr<backend::Backend> make_backend(const BackendSpec& spec, Role role,
                                               const RunConfig& config);

struct InferOptions {
  bool strong_only = false;
  std::string split = "eval";  // eval | train
};

// Run layout: {output_dir}/{run_id}/{outputs,prefs,logs,reports}/ plus the
// echoed config.json.

/// Collaborative (or strong-only) inference over a split, then scoring.
/// Writes outputs/infer_{mode}.jsonl, logs/infer_{mode}_run_log.jsonl and
/// reports/metrics_{mode}.jsonl.
CommandOutcome cmd_infer(const RunConfig& config, const InferOptions& options, std::ostream& out);

/// Preference construction over the training dataset. Writes
/// prefs/preferences.jsonl (+ .stats.json), prefs/samples.jsonl,
/// logs/judge_audit.jsonl and logs/build_prefs_run_log.jsonl. A spent request
/// budget flushes partial outputs and yields kExitBudget.
CommandOutcome cmd_build_prefs(const RunConfig& config, std::ostream& out);

/// Gradient self-check, SFT from the uniform policy, preference construction
/// with toy backends, DPO from the SFT policy and the negative-support check.
/// Exit code is kExitOk on PASS and kExitOther on FAIL.
CommandOutcome cmd_train_toy(const RunConfig& config, std::ostream& out);

/// Renders metric report files side by side, optionally with the reference
/// fixture column.
std::string cmd_report(const std::vector<fs::path>& paths,
                       const std::optional<fs::path>& reference_fixture);

// COWEST_DATA_DIR, else the data directory the tool was built from.
fs::path default_data_dir();

}  // namespace cowest::cli
