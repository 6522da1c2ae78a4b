#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cowest/core/dataset.hpp"
#include "cowest/core/records.hpp"

namespace cowest::metrics {

struct ClassScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  std::string metric;  // "em", "token_f1", "accuracy", "macro_f1"
  double value = 0.0;
  std::size_t n = 0;
  std::optional<std::vector<ClassScore>> per_class;  // macro_f1 only

  Record to_record() const;
  static MetricReport from_record(const Record& record);
};

int exact_match(std::string_view pred, std::string_view gold);

// Multiset token overlap F1 on normalized tokens. Both empty -> 1, one empty -> 0.
double token_f1(std::string_view pred, std::string_view gold);

// Fraction of positions whose normalized forms agree. Throws LengthMismatch,
// PreconditionViolation on empty input.
double accuracy(std::span<const std::string> preds, std::span<const std::string> golds);

/// Unweighted mean of per-label F1 over every label in `labels`, including
/// labels never predicted or never gold. 0/0 precision, recall or F1 count as
/// 0. Labels are compared after normalization. Throws UnknownLabel for a gold
/// outside `labels`, LengthMismatch.
MetricReport macro_f1(std::span<const std::string> preds, std::span<const std::string> golds,
                      std::span<const std::string> labels);

struct ScoredOutput {
  Example example;
  std::string final_text;
};

// Maps an extracted multiple-choice answer onto a choice label: a label match
// wins, then a match on a choice's full text; otherwise the answer is
// returned unchanged.
std::string to_choice_label(const Example& example, const std::string& answer);

/// Metrics for one task kind over pipeline outputs, after final-answer
/// extraction: open_qa -> em, token_f1; multiple_choice and classification ->
/// accuracy, macro_f1.
std::vector<MetricReport> score_run(std::span<const ScoredOutput> outputs, TaskKind kind);

}  // namespace cowest::metrics
