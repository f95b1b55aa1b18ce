#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "opinet/graph.hpp"

namespace opinet {

// Mean absolute belief across the nodes of one trial.
double radicalization(const std::vector<double>& beliefs);

// Population standard deviation of beliefs within one trial (divisor n).
// Needs at least two nodes.
double polarization(const std::vector<double>& beliefs);

// Fraction of nodes whose belief sign matches truth_sign (+1 or -1).
// A belief of exactly zero is counted as incorrect.
double choice_accuracy(const std::vector<double>& beliefs, int truth_sign);

// Fraction of nodes with |belief| strictly above |reference_belief|.
// An empty belief vector yields 0.
double overconfidence_fraction(const std::vector<double>& beliefs,
                               double reference_belief);

struct BeliefHistogram {
  std::vector<double> edges;          // bins + 1 ascending boundaries
  std::vector<std::uint64_t> counts;  // one per bin
};

// Pools beliefs across trials and bins them into `bins` equal-width bins over
// the observed range. When all pooled values coincide the range is widened by
// 0.5 on both sides. Values equal to the upper boundary land in the last bin.
// When a graph is given, each trial must carry one belief per node and only
// nodes with degree_lo <= degree <= degree_hi are pooled; selecting no values
// at all is a configuration error.
BeliefHistogram belief_histogram(
    const std::vector<std::vector<double>>& beliefs_by_trial,
    std::uint32_t bins, const SocialGraph* graph = nullptr,
    std::uint32_t degree_lo = 0,
    std::uint32_t degree_hi = std::numeric_limits<std::uint32_t>::max());

// Number of modes in a histogram. Counts are smoothed with a centered moving
// average of window 5 (truncated at the ends); a candidate mode is a plateau
// of equal smoothed values strictly above both plateau neighbors, with the
// array bounded by -inf on each side, and its smoothed height must reach
// min_rel_height times the smoothed maximum. Candidates only count as
// distinct modes when the smoothed histogram dips below merge_ratio times the
// lower of the two heights somewhere between them; otherwise the lower
// candidate is folded into the higher one. Beliefs pooled across trials pile
// up in one narrow spike per trial, so a finite sample of a one-hump
// distribution is a comb of such spikes; the dip requirement keeps comb teeth
// from being read as separate modes while a genuinely split population, whose
// gap empties out, still counts as two.
std::uint32_t count_modes(const std::vector<std::uint64_t>& counts,
                          double min_rel_height = 0.05,
                          double merge_ratio = 0.5);

// Spearman rank correlation with average ranks on ties. Returns NaN when
// either input is constant; sizes must match and hold at least two points.
double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y);

}  // namespace opinet
