#pragma once

#include <cstdint>
#include <span>

namespace cowest::backend {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state advanced by the golden
/// gamma 0x9E3779B97F4A7C15, output mixed with the variant-13 finalizer.
/// Chosen because the whole algorithm fits in a few lines, so any port
/// reproduces the same stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  // Uniform in [0, 1) from the top 53 bits.
  double next_unit() noexcept;

 private:
  std::uint64_t state_;
};

// Seed for the draw with the given sample index: seed XOR sample_index.
std::uint64_t derive_seed(std::int64_t seed, std::uint64_t sample_index) noexcept;

/// Draws an index from softmax(logits / temperature) restricted to the top_p
/// nucleus. Candidates are ranked by probability (ties by lower index); the
/// nucleus is the shortest prefix whose mass reaches top_p. temperature == 0
/// returns the argmax (lowest index on ties).
std::size_t sample_index_from_logits(std::span<const double> logits, double temperature,
                                     double top_p, SplitMix64& rng);

}  // namespace cowest::backend
