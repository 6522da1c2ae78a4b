#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cowest/core/dataset.hpp"

namespace cowest::toyalign {

/// One query of the toy world: a finite set of candidate responses, the
/// reference answer, the judge score every response earns after refinement,
/// and the score the strong model earns on its own.
struct ToyContext {
  std::string id;
  std::string query;
  std::vector<std::string> vocab;
  std::size_t ground_truth = 0;
  std::vector<int> quality;  // per vocab entry, in [1, 10]
  int baseline = 5;          // strong-only score, in [1, 10]

  std::size_t size() const noexcept { return vocab.size(); }
  bool is_negative(std::size_t index) const { return quality.at(index) <= baseline; }
  std::vector<std::size_t> negative_support() const;
  std::vector<std::size_t> positive_support() const;
  // Index of the vocab entry equal to `text`, if any.
  std::optional<std::size_t> find(std::string_view text) const;
};

struct ToyUniverse {
  std::string name;
  std::vector<ToyContext> contexts;

  std::size_t size() const noexcept { return contexts.size(); }
  // Context whose query occurs in `text`; the longest query wins.
  std::optional<std::size_t> locate(std::string_view text) const;
};

// Throws ConstraintViolation naming the offending context.
void validate(const ToyUniverse& universe);

// JSON document {"name": ..., "contexts": [{id, query, vocab, ground_truth,
// quality, baseline}, ...]}. Throws IoFailure, MalformedRecord,
// ConstraintViolation.
ToyUniverse load_universe(const std::filesystem::path& path);

// Open-QA dataset view: one example per context, ground truth = the
// reference vocab entry.
Dataset to_dataset(const ToyUniverse& universe);

}  // namespace cowest::toyalign
