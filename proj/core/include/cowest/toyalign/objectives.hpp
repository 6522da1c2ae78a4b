#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "cowest/toyalign/policy.hpp"
#include "cowest/toyalign/universe.hpp"

namespace cowest::toyalign {

struct DpoTriplet {
  std::size_t context = 0;
  std::size_t chosen = 0;
  std::size_t rejected = 0;

  friend bool operator==(const DpoTriplet&, const DpoTriplet&) = default;
};

// Mean over contexts of -log pi(ground_truth | context).
double sft_loss(const ToyPolicy& policy, const ToyUniverse& universe);
// d/dlogit_j = (softmax_j - [j == gt]) / #contexts.
Gradient sft_grad(const ToyPolicy& policy, const ToyUniverse& universe);

// -log sigmoid(z) computed without overflow.
double neg_log_sigmoid(double z) noexcept;
double sigmoid(double z) noexcept;

// Reference-relative margin alpha * (log-ratio(chosen) - log-ratio(rejected)).
double dpo_margin(const ToyPolicy& policy, const ToyPolicy& reference, const DpoTriplet& t,
                  double alpha);

/// Mean over triplets of -log sigmoid(margin). An empty triplet list has loss 0.
double dpo_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                std::span<const DpoTriplet> triplets, double alpha);

/// Exact gradient of dpo_loss in the policy logits. Per triplet the outer
/// derivative is -alpha * sigmoid(-margin), applied to
/// dlog pi(chosen) - dlog pi(rejected) with dlog pi(y)/dlogit_j = [j == y] - softmax_j.
Gradient dpo_grad(const ToyPolicy& policy, const ToyPolicy& reference,
                  std::span<const DpoTriplet> triplets, double alpha);

/// A differentiable loss over policies.
struct Objective {
  std::function<double(const ToyPolicy&)> loss;
  std::function<Gradient(const ToyPolicy&)> grad;
};

Objective sft_objective(const ToyUniverse& universe);
Objective dpo_objective(const ToyPolicy& reference, std::vector<DpoTriplet> triplets, double alpha);

/// Central finite differences with step h on every logit, compared to the
/// analytic gradient. Returns max_j |analytic_j - fd_j| / max(1e-3, |fd_j|, |analytic_j|).
double fd_check(const Objective& objective, const ToyPolicy& policy, double h);

}  // namespace cowest::toyalign
