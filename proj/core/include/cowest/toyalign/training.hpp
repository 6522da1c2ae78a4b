#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cowest/core/records.hpp"
#include "cowest/toyalign/objectives.hpp"
#include "cowest/toyalign/policy.hpp"

namespace cowest::toyalign {

struct TrainStep {
  std::size_t step = 0;
  double loss = 0.0;
};

// losses[s] is the loss before update s; the final entry (step == steps) is
// the loss of the returned policy.
struct TrainLog {
  std::vector<TrainStep> steps;

  std::vector<Record> records() const;
};

struct TrainOptions {
  double lr = 0.5;
  std::size_t steps = 2000;
  // Consecutive loss increases tolerated before DivergenceDetected.
  std::size_t patience = 10;
};

/// Full-batch gradient descent with a fixed learning rate. Throws
/// DivergenceDetected once the loss has risen `patience` steps in a row.
ToyPolicy gradient_descent(const Objective& objective, ToyPolicy init, const TrainOptions& options,
                           TrainLog* log = nullptr);

ToyPolicy train_sft(const ToyUniverse& universe, const ToyPolicy& init, const TrainOptions& options,
                    TrainLog* log = nullptr);

// Starts from the reference policy.
ToyPolicy train_dpo(const ToyUniverse& universe, const ToyPolicy& reference,
                    std::span<const DpoTriplet> triplets, double alpha, const TrainOptions& options,
                    TrainLog* log = nullptr);

struct ContextMass {
  std::string context;
  double mass = 0.0;          // negative-support mass under the trained policy
  double initial_mass = 0.0;  // same under the initial policy
};

struct CorollaryReport {
  double epsilon = 0.0;
  bool pass = false;
  std::vector<ContextMass> contexts;

  Record to_record() const;
};

/// Checks that the trained policy keeps less than `epsilon` mass on every
/// context's negative support {y : quality(y) <= baseline}. `initial` defaults
/// to the uniform policy.
CorollaryReport verify_corollary(const ToyPolicy& trained, const ToyUniverse& universe,
                                 double epsilon, const ToyPolicy* initial = nullptr);

}  // namespace cowest::toyalign
