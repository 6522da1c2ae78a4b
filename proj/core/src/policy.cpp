#include "cowest/toyalign/policy.hpp"

#include <algorithm>
#include <cmath>

#include "cowest/core/errors.hpp"

namespace cowest::toyalign {

ToyPolicy ToyPolicy::uniform(const ToyUniverse& universe) {
  ToyPolicy p;
  for (const auto& c : universe.contexts) p.logits.emplace_back(c.size(), 0.0);
  return p;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (auto& v : out) v /= z;
  return out;
}

double log_sum_exp(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return mx + std::log(z);
}

std::vector<double> ToyPolicy::probabilities(std::size_t context) const {
  return softmax(logits.at(context));
}

double ToyPolicy::log_prob(std::size_t context, std::size_t index) const {
  const auto& row = logits.at(context);
  return row.at(index) - log_sum_exp(row);
}

Gradient zeros_like(const ToyPolicy& policy) {
  Gradient g;
  for (const auto& row : policy.logits) g.emplace_back(row.size(), 0.0);
  return g;
}

double policy_prob(const ToyPolicy& policy, std::size_t context, std::size_t index) {
  const auto probs = policy.probabilities(context);
  if (index >= probs.size()) throw PreconditionViolation("vocab index out of range");
  return probs[index];
}

double negative_mass(const ToyPolicy& policy, const ToyUniverse& universe, std::size_t context) {
  const auto probs = policy.probabilities(context);
  double mass = 0.0;
  for (std::size_t i : universe.contexts.at(context).negative_support()) mass += probs[i];
  return mass;
}

std::vector<Record> policy_records(const ToyPolicy& policy, const ToyUniverse& universe) {
  std::vector<Record> out;
  for (std::size_t c = 0; c < universe.size(); ++c) {
    const auto probs = policy.probabilities(c);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      out.push_back({{"context", universe.contexts[c].id},
                     {"index", i},
                     {"probability", probs[i]},
                     {"response", universe.contexts[c].vocab[i]}});
    }
  }
  return out;
}

ToyPolicy policy_from_records(std::span<const Record> records, const ToyUniverse& universe) {
  ToyPolicy p = ToyPolicy::uniform(universe);
  std::vector<std::vector<bool>> seen;
  for (const auto& c : universe.contexts) seen.emplace_back(c.size(), false);
  for (const auto& r : records) {
    const auto id = r.at("context").get<std::string>();
    const auto index = r.at("index").get<std::size_t>();
    const auto prob = r.at("probability").get<double>();
    auto it = std::find_if(universe.contexts.begin(), universe.contexts.end(),
                           [&](const ToyContext& c) { return c.id == id; });
    if (it == universe.contexts.end()) throw ConstraintViolation(id, "context not in universe");
    const auto c = static_cast<std::size_t>(it - universe.contexts.begin());
    if (index >= it->size()) throw ConstraintViolation(id, "index out of range");
    if (!(prob > 0.0)) throw ConstraintViolation(id, "probabilities must be positive");
    p.logits[c][index] = std::log(prob);
    seen[c][index] = true;
  }
  for (std::size_t c = 0; c < seen.size(); ++c)
    for (bool s : seen[c])
      if (!s) throw ConstraintViolation(universe.contexts[c].id, "policy records incomplete");
  return p;
}

}  // namespace cowest::toyalign
