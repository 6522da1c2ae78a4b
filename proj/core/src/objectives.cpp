#include "cowest/toyalign/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cowest/core/errors.hpp"

namespace cowest::toyalign {

double sft_loss(const ToyPolicy& policy, const ToyUniverse& universe) {
  double total = 0.0;
  for (std::size_t c = 0; c < universe.size(); ++c)
    total -= policy.log_prob(c, universe.contexts[c].ground_truth);
  return total / static_cast<double>(universe.size());
}

Gradient sft_grad(const ToyPolicy& policy, const ToyUniverse& universe) {
  Gradient g = zeros_like(policy);
  const double scale = 1.0 / static_cast<double>(universe.size());
  for (std::size_t c = 0; c < universe.size(); ++c) {
    const auto probs = policy.probabilities(c);
    for (std::size_t j = 0; j < probs.size(); ++j) g[c][j] = scale * probs[j];
    g[c][universe.contexts[c].ground_truth] -= scale;
  }
  return g;
}

double neg_log_sigmoid(double z) noexcept {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dpo_margin(const ToyPolicy& policy, const ToyPolicy& reference, const DpoTriplet& t,
                  double alpha) {
  const double chosen = policy.log_prob(t.context, t.chosen) - reference.log_prob(t.context, t.chosen);
  const double rejected =
      policy.log_prob(t.context, t.rejected) - reference.log_prob(t.context, t.rejected);
  return alpha * chosen - alpha * rejected;
}

double dpo_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                std::span<const DpoTriplet> triplets, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionViolation("alpha must be > 0");
  if (triplets.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : triplets) total += neg_log_sigmoid(dpo_margin(policy, reference, t, alpha));
  return total / static_cast<double>(triplets.size());
}

Gradient dpo_grad(const ToyPolicy& policy, const ToyPolicy& reference,
                  std::span<const DpoTriplet> triplets, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionViolation("alpha must be > 0");
  Gradient g = zeros_like(policy);
  if (triplets.empty()) return g;
  const double scale = 1.0 / static_cast<double>(triplets.size());
  for (const auto& t : triplets) {
    const double coeff = -alpha * sigmoid(-dpo_margin(policy, reference, t, alpha)) * scale;
    // The softmax terms of dlog pi(chosen) and dlog pi(rejected) cancel, so
    // only the two indicator entries survive.
    g[t.context][t.chosen] += coeff;
    g[t.context][t.rejected] -= coeff;
  }
  return g;
}

Objective sft_objective(const ToyUniverse& universe) {
  auto u = std::make_shared<const ToyUniverse>(universe);
  return Objective{[u](const ToyPolicy& p) { return sft_loss(p, *u); },
                   [u](const ToyPolicy& p) { return sft_grad(p, *u); }};
}

Objective dpo_objective(const ToyPolicy& reference, std::vector<DpoTriplet> triplets,
                        double alpha) {
  auto ref = std::make_shared<const ToyPolicy>(reference);
  auto shared = std::make_shared<const std::vector<DpoTriplet>>(std::move(triplets));
  return Objective{
      [ref, shared, alpha](const ToyPolicy& p) { return dpo_loss(p, *ref, *shared, alpha); },
      [ref, shared, alpha](const ToyPolicy& p) { return dpo_grad(p, *ref, *shared, alpha); }};
}

namespace {
// Entries whose true gradient is zero only carry round-off in fd.
constexpr double kFdFloor = 1e-3;
}  // namespace

double fd_check(const Objective& objective, const ToyPolicy& policy, double h) {
  if (!(h > 0.0)) throw PreconditionViolation("h must be > 0");
  const Gradient analytic = objective.grad(policy);
  ToyPolicy probe = policy;
  double worst = 0.0;
  for (std::size_t c = 0; c < policy.logits.size(); ++c) {
    for (std::size_t j = 0; j < policy.logits[c].size(); ++j) {
      const double x = policy.logits[c][j];
      probe.logits[c][j] = x + h;
      const double up = objective.loss(probe);
      probe.logits[c][j] = x - h;
      const double down = objective.loss(probe);
      probe.logits[c][j] = x;
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(analytic[c][j] - fd) / std::max({kFdFloor, std::abs(fd), std::abs(analytic[c][j])}));
    }
  }
  return worst;
}

}  // namespace cowest::toyalign
