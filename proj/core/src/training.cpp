#include "cowest/toyalign/training.hpp"

#include <cmath>

#include "cowest/core/errors.hpp"

namespace cowest::toyalign {

std::vector<Record> TrainLog::records() const {
  std::vector<Record> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back({{"loss", s.loss}, {"step", s.step}});
  return out;
}

ToyPolicy gradient_descent(const Objective& objective, ToyPolicy policy,
                           const TrainOptions& options, TrainLog* log) {
  if (!(options.lr > 0.0)) throw PreconditionViolation("lr must be > 0");
  double previous = objective.loss(policy);
  std::size_t rising = 0;
  for (std::size_t step = 0; step < options.steps; ++step) {
    if (log) log->steps.push_back({step, previous});
    const Gradient g = objective.grad(policy);
    for (std::size_t c = 0; c < g.size(); ++c)
      for (std::size_t j = 0; j < g[c].size(); ++j) policy.logits[c][j] -= options.lr * g[c][j];

    const double loss = objective.loss(policy);
    if (!std::isfinite(loss)) throw DivergenceDetected(step + 1, loss);
    rising = loss > previous ? rising + 1 : 0;
    if (rising >= options.patience) throw DivergenceDetected(step + 1, loss);
    previous = loss;
  }
  if (log) log->steps.push_back({options.steps, previous});
  return policy;
}

ToyPolicy train_sft(const ToyUniverse& universe, const ToyPolicy& init, const TrainOptions& options,
                    TrainLog* log) {
  return gradient_descent(sft_objective(universe), init, options, log);
}

ToyPolicy train_dpo(const ToyUniverse& universe, const ToyPolicy& reference,
                    std::span<const DpoTriplet> triplets, double alpha, const TrainOptions& options,
                    TrainLog* log) {
  for (const auto& t : triplets) {
    if (t.context >= universe.size() || t.chosen >= universe.contexts[t.context].size() ||
        t.rejected >= universe.contexts[t.context].size())
      throw PreconditionViolation("triplet indexes outside the universe");
  }
  return gradient_descent(dpo_objective(reference, {triplets.begin(), triplets.end()}, alpha),
                          reference, options, log);
}

Record CorollaryReport::to_record() const {
  Record ctxs = Record::array();
  for (const auto& c : contexts)
    ctxs.push_back({{"context", c.context},
                    {"initial_negative_mass", c.initial_mass},
                    {"negative_mass", c.mass}});
  return {{"contexts", ctxs}, {"epsilon", epsilon}, {"status", pass ? "PASS" : "FAIL"}};
}

CorollaryReport verify_corollary(const ToyPolicy& trained, const ToyUniverse& universe,
                                 double epsilon, const ToyPolicy* initial) {
  if (!(epsilon > 0.0)) throw PreconditionViolation("epsilon must be > 0");
  const ToyPolicy uniform = ToyPolicy::uniform(universe);
  const ToyPolicy& start = initial ? *initial : uniform;
  CorollaryReport report;
  report.epsilon = epsilon;
  report.pass = true;
  for (std::size_t c = 0; c < universe.size(); ++c) {
    ContextMass m{universe.contexts[c].id, negative_mass(trained, universe, c),
                  negative_mass(start, universe, c)};
    if (!(m.mass < epsilon)) report.pass = false;
    report.contexts.push_back(std::move(m));
  }
  return report;
}

}  // namespace cowest::toyalign
