#include "opinet/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "opinet/common.hpp"

namespace opinet {

namespace {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base) { return splitmix64(base); }

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a) {
  return splitmix64(splitmix64(base) ^ a);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

double Rng::uniform01() {
  // Top 53 bits scaled by 2^-53: exactly representable, uniform on [0, 1).
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
  if (bound == 0) {
    throw ConfigError("uniform_int: bound must be positive");
  }
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t residue = max % bound;
  if (residue == bound - 1) {
    return gen_() % bound;  // bound divides 2^64
  }
  const std::uint64_t last_accepted = max - residue - 1;
  std::uint64_t r = gen_();
  while (r > last_accepted) {
    r = gen_();
  }
  return r % bound;
}

double Rng::normal(double mean, double stddev) {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return mean + stddev * cached_normal_;
  }
  // u1 in (0, 1] keeps the log argument positive.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return mean + stddev * r * std::cos(theta);
}

std::vector<std::uint32_t> Rng::sample_distinct(std::uint32_t n,
                                                std::uint32_t k) {
  if (k > n) {
    throw ConfigError("sample_distinct: requested " + std::to_string(k) +
                      " distinct values from a range of " + std::to_string(n));
  }
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    pool[i] = i;
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + uniform_int(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace opinet
