#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace opinet {

// Chained splitmix64 finalizer. Derives well-separated 64-bit seeds from a
// base seed plus stream/trial indexes, so any unit of a larger run can be
// reproduced in isolation: seed(base, g, t) for trial t on graph replicate g.
std::uint64_t mix_seed(std::uint64_t base);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Deterministic random source. Distributions are hand-rolled on top of
// mt19937_64 because the standard library does not pin <random> distribution
// algorithms; streams must be stable across compilers and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform integer on [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t bound);

  // Normal(mean, stddev^2) via Box-Muller; the second variate of each pair is
  // cached, so draws come in deterministic pairs.
  double normal(double mean, double stddev);

  // k distinct values from {0,...,n-1} by partial Fisher-Yates. Result is in
  // draw order, not sorted.
  std::vector<std::uint32_t> sample_distinct(std::uint32_t n, std::uint32_t k);

 private:
  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace opinet
