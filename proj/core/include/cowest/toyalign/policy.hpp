#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cowest/core/records.hpp"
#include "cowest/toyalign/universe.hpp"

namespace cowest::toyalign {

/// Per-context logit vectors; the policy is their row-wise softmax.
/// Gradients share the same shape.
struct ToyPolicy {
  std::vector<std::vector<double>> logits;

  static ToyPolicy uniform(const ToyUniverse& universe);

  std::size_t contexts() const noexcept { return logits.size(); }
  std::vector<double> probabilities(std::size_t context) const;
  double log_prob(std::size_t context, std::size_t index) const;

  friend bool operator==(const ToyPolicy&, const ToyPolicy&) = default;
};

using Gradient = std::vector<std::vector<double>>;

Gradient zeros_like(const ToyPolicy& policy);

// Numerically stable softmax and log-sum-exp.
std::vector<double> softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> logits);

double policy_prob(const ToyPolicy& policy, std::size_t context, std::size_t index);

// Mass the policy places on responses whose quality does not beat the baseline.
double negative_mass(const ToyPolicy& policy, const ToyUniverse& universe, std::size_t context);

// One record per (context, vocab entry): {context, index, probability, response}.
std::vector<Record> policy_records(const ToyPolicy& policy, const ToyUniverse& universe);

// Inverse of policy_records up to a per-context logit shift (logit = log p).
// Throws ConstraintViolation when the records do not cover the universe.
ToyPolicy policy_from_records(std::span<const Record> records, const ToyUniverse& universe);

}  // namespace cowest::toyalign
