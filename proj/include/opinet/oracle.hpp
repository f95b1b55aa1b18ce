#pragma once

#include <cstdint>
#include <vector>

#include "opinet/graph.hpp"

namespace opinet {

// 2^n state enumeration; a hard guard, not a soft warning.
inline constexpr std::uint32_t kOracleMaxNodes = 20;

// Exact per-node marginals p(x_i = +1) for the pairwise binary model
//   w(x) = exp(sum_{edges} J_ij x_i x_j + sum_i m_i x_i),  x_i in {-1, +1},
// by exhaustive enumeration with log-domain stabilization.
//
// Accumulation order is value-sorted at both levels (per-state log-weight
// terms, and per-node numerator buckets), and the final probability is
// rounded onto the 2^-53 grid. This makes two invariants hold bitwise, not
// just approximately: negating the external field maps every p to exactly
// 1 - p, and relabeling nodes permutes the marginals exactly. The grid
// rounding perturbs each probability by at most 2^-54.
std::vector<double> exact_marginals(const SocialGraph& graph,
                                    const Couplings& couplings,
                                    const std::vector<double>& external);

// The confidence of an observer reading every external message directly:
// the plain sum of the field, accumulated in node order.
double universal_observer(const std::vector<double>& external);

}  // namespace opinet
