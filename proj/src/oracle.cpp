#include "opinet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opinet/common.hpp"

namespace opinet {

namespace {

// Rounds p onto the grid of multiples of 2^-53. Every such value and its
// complement 1 - p are exactly representable doubles, so the pair
// (p, 1 - p) is closed under the sign-flip symmetry.
double quantize_probability(double p) {
  return std::ldexp(std::nearbyint(std::ldexp(p, 53)), -53);
}

}  // namespace

std::vector<double> exact_marginals(const SocialGraph& graph,
                                    const Couplings& couplings,
                                    const std::vector<double>& external) {
  const std::uint32_t n = graph.node_count();
  if (n == 0) {
    throw ConfigError("exact_marginals: empty graph");
  }
  if (n > kOracleMaxNodes) {
    throw ConfigError("exact_marginals: " + std::to_string(n) +
                      " nodes exceeds the 2^n enumeration budget (n <= " +
                      std::to_string(kOracleMaxNodes) + ")");
  }
  if (couplings.size() != graph.edge_count()) {
    throw ConfigError("exact_marginals: couplings size " +
                      std::to_string(couplings.size()) +
                      " does not match edge count " +
                      std::to_string(graph.edge_count()));
  }
  if (external.size() != n) {
    throw ConfigError("exact_marginals: external field size " +
                      std::to_string(external.size()) +
                      " does not match node count " + std::to_string(n));
  }
  for (const double j : couplings) {
    if (!std::isfinite(j)) {
      throw ConfigError("exact_marginals: non-finite coupling");
    }
  }
  for (const double m : external) {
    if (!std::isfinite(m)) {
      throw ConfigError("exact_marginals: non-finite external message");
    }
  }

  const std::uint32_t n_edges = graph.edge_count();
  const std::uint64_t n_states = 1ull << n;
  const auto& edges = graph.edges();

  // Per-state log-weight: terms +-J_e and +-m_i summed in value-sorted order
  // so the result is independent of node labeling.
  std::vector<double> log_weight(n_states);
  std::vector<double> terms(n_edges + n);
  double max_log = -1.0 / 0.0;
  for (std::uint64_t state = 0; state < n_states; ++state) {
    for (std::uint32_t e = 0; e < n_edges; ++e) {
      const bool si = (state >> edges[e].first) & 1ull;
      const bool sj = (state >> edges[e].second) & 1ull;
      terms[e] = (si == sj) ? couplings[e] : -couplings[e];
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      terms[n_edges + i] = ((state >> i) & 1ull) ? external[i] : -external[i];
    }
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (const double t : terms) {
      acc += t;
    }
    log_weight[state] = acc;
    max_log = std::max(max_log, acc);
  }

  std::vector<double> weight(n_states);
  for (std::uint64_t state = 0; state < n_states; ++state) {
    weight[state] = std::exp(log_weight[state] - max_log);
  }

  std::vector<double> marginals(n);
  std::vector<double> bucket_plus(n_states / 2);
  std::vector<double> bucket_minus(n_states / 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::size_t np = 0;
    std::size_t nm = 0;
    for (std::uint64_t state = 0; state < n_states; ++state) {
      if ((state >> i) & 1ull) {
        bucket_plus[np++] = weight[state];
      } else {
        bucket_minus[nm++] = weight[state];
      }
    }
    // Value-sorted accumulation: both buckets hold the same multiset under
    // the field sign flip (weights of complemented states), so their sums
    // agree bitwise rather than merely to rounding.
    std::sort(bucket_plus.begin(), bucket_plus.end());
    std::sort(bucket_minus.begin(), bucket_minus.end());
    double sum_plus = 0.0;
    for (const double w : bucket_plus) {
      sum_plus += w;
    }
    double sum_minus = 0.0;
    for (const double w : bucket_minus) {
      sum_minus += w;
    }
    const double denom = sum_plus + sum_minus;
    const double minority = std::min(sum_plus, sum_minus) / denom;
    const double q = quantize_probability(minority);
    marginals[i] = (sum_plus >= sum_minus) ? 1.0 - q : q;
  }
  return marginals;
}

double universal_observer(const std::vector<double>& external) {
  double sum = 0.0;
  for (const double m : external) {
    sum += m;
  }
  return sum;
}

}  // namespace opinet
