#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cowest/backend/backend.hpp"
#include "cowest/backend/cache.hpp"
#include "cowest/collab/pipeline.hpp"
#include "cowest/core/dataset.hpp"
#include "cowest/core/records.hpp"
#include "cowest/judge/judge.hpp"

namespace cowest::prefdata {

enum class Polarity { positive, negative };

std::string_view to_string(Polarity polarity) noexcept;

// Positive iff the refined draft beat the strong-only score (delta > 0);
// ties are negative.
constexpr Polarity classify(int delta) noexcept {
  return delta > 0 ? Polarity::positive : Polarity::negative;
}

/// One judged weak draft.
struct SampleRecord {
  std::string example_id;
  std::uint64_t sample_index = 0;
  std::string draft_text;
  std::string refined_text;
  int e_collab = 0;
  int e_strong = 0;
  int delta = 0;
  Polarity polarity = Polarity::negative;

  Record to_record() const;
};

struct TripletMeta {
  std::string example_id;
  int e_strong = 0;
  int e_collab_chosen = 0;
  int e_collab_rejected = 0;
  std::uint64_t chosen_index = 0;
  std::uint64_t rejected_index = 0;

  friend bool operator==(const TripletMeta&, const TripletMeta&) = default;
};

struct PreferenceTriplet {
  std::string prompt;  // the weak-draft prompt the weak model conditioned on
  std::string chosen;
  std::string rejected;
  TripletMeta meta;

  friend bool operator==(const PreferenceTriplet&, const PreferenceTriplet&) = default;
};

/// Pairs positives[j] with negatives[j] for j < min(|positives|, |negatives|).
/// Both lists are expected in ascending sample_index order.
std::vector<PreferenceTriplet> pair(std::span<const SampleRecord> positives,
                                    std::span<const SampleRecord> negatives,
                                    const std::string& prompt);

struct PrefStats {
  std::size_t examples_processed = 0;
  std::size_t examples_skipped = 0;     // strong-only answer or its score unavailable
  std::size_t examples_incomplete = 0;  // cut short by the request budget
  std::size_t samples_judged = 0;
  std::size_t dropped_parse_failures = 0;
  std::size_t dropped_other_failures = 0;
  std::size_t positives = 0;
  std::size_t triplet_count = 0;
  bool partial = false;

  double positive_rate() const noexcept {
    return samples_judged == 0 ? 0.0
                               : static_cast<double>(positives) / static_cast<double>(samples_judged);
  }
  Record to_record() const;
};

struct BuildOptions {
  std::size_t samples_per_example = 5;  // K
  backend::Sampler weak_sampler = backend::kWeakTrainingSampler;
  collab::PipelineContext pipeline;
  judge::JudgeContext judge;
  std::size_t max_in_flight = 8;
};

struct BuildResult {
  std::vector<PreferenceTriplet> triplets;
  std::vector<SampleRecord> samples;
  std::vector<Record> judge_audit;
  PrefStats stats;
};

/// Preference construction over a dataset. Per example: one strong-only
/// answer z and its score, K weak drafts each refined by the strong model and
/// judged, classification by delta and index-aligned pairing. Calls go
/// through the cache and the bounded batch executor, stage by stage.
///
/// Per-sample failures drop that sample; a failed strong-only answer skips the
/// example. Exhausting the request budget does not throw: finished examples
/// keep their triplets, the rest count as incomplete and stats.partial is set.
BuildResult build_preferences(const Dataset& dataset, backend::Backend& weak,
                              backend::Backend& strong, backend::Backend& judge,
                              const BuildOptions& options);

Record to_record(const PreferenceTriplet& triplet);
PreferenceTriplet triplet_from_record(const Record& record);

// Sorted by (example_id, chosen_index, rejected_index).
void sort_triplets(std::vector<PreferenceTriplet>& triplets);

/// Writes the preference file (one {prompt, chosen, rejected, meta} per line)
/// and `{stem}.stats.json` next to it. Empty input still produces both files.
void export_dpo(std::vector<PreferenceTriplet> triplets, const PrefStats& stats,
                const std::filesystem::path& path);
std::vector<PreferenceTriplet> read_dpo(const std::filesystem::path& path);
std::filesystem::path stats_sidecar_path(const std::filesystem::path& path);

}  // namespace cowest::prefdata
