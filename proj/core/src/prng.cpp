#include "cowest/backend/prng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cowest::backend {

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::int64_t seed, std::uint64_t sample_index) noexcept {
  return static_cast<std::uint64_t>(seed) ^ sample_index;
}

std::size_t sample_index_from_logits(std::span<const double> logits, double temperature,
                                     double top_p, SplitMix64& rng) {
  if (logits.empty()) throw std::invalid_argument("empty logits");
  const std::size_t n = logits.size();
  if (temperature <= 0.0) {
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) -
                                    logits.begin());
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::exp((logits[i] - mx) / temperature);
    z += probs[i];
  }
  for (auto& p : probs) p /= z;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::size_t keep = 0;
  double mass = 0.0;
  while (keep < n) {
    mass += probs[order[keep]];
    ++keep;
    if (mass >= top_p) break;
  }
  const double u = rng.next_unit() * mass;
  double acc = 0.0;
  for (std::size_t k = 0; k < keep; ++k) {
    acc += probs[order[k]];
    if (u < acc) return order[k];
  }
  return order[keep - 1];
}

}  // namespace cowest::backend
