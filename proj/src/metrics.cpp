#include "opinet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "opinet/common.hpp"

namespace opinet {

double radicalization(const std::vector<double>& beliefs) {
  if (beliefs.empty()) {
    throw ConfigError("radicalization: no beliefs");
  }
  double sum = 0.0;
  for (const double b : beliefs) {
    sum += std::fabs(b);
  }
  return sum / static_cast<double>(beliefs.size());
}

double polarization(const std::vector<double>& beliefs) {
  if (beliefs.size() < 2) {
    throw ConfigError("polarization: needs at least two beliefs");
  }
  const double n = static_cast<double>(beliefs.size());
  double mean = 0.0;
  for (const double b : beliefs) {
    mean += b;
  }
  mean /= n;
  double var = 0.0;
  for (const double b : beliefs) {
    const double d = b - mean;
    var += d * d;
  }
  return std::sqrt(var / n);
}

double choice_accuracy(const std::vector<double>& beliefs, int truth_sign) {
  if (truth_sign != 1 && truth_sign != -1) {
    throw ConfigError("choice_accuracy: truth_sign must be +1 or -1");
  }
  if (beliefs.empty()) {
    throw ConfigError("choice_accuracy: no beliefs");
  }
  std::size_t correct = 0;
  for (const double b : beliefs) {
    if ((truth_sign > 0 && b > 0.0) || (truth_sign < 0 && b < 0.0)) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(beliefs.size());
}

double overconfidence_fraction(const std::vector<double>& beliefs,
                               double reference_belief) {
  if (beliefs.empty()) {
    return 0.0;
  }
  const double bar = std::fabs(reference_belief);
  std::size_t over = 0;
  for (const double b : beliefs) {
    if (std::fabs(b) > bar) {
      ++over;
    }
  }
  return static_cast<double>(over) / static_cast<double>(beliefs.size());
}

BeliefHistogram belief_histogram(
    const std::vector<std::vector<double>>& beliefs_by_trial,
    std::uint32_t bins, const SocialGraph* graph, std::uint32_t degree_lo,
    std::uint32_t degree_hi) {
  if (bins < 2) {
    throw ConfigError("belief_histogram: needs at least two bins");
  }
  std::vector<double> pooled;
  for (const auto& trial : beliefs_by_trial) {
    if (graph == nullptr) {
      pooled.insert(pooled.end(), trial.begin(), trial.end());
      continue;
    }
    if (trial.size() != graph->node_count()) {
      throw ConfigError("belief_histogram: trial holds " +
                        std::to_string(trial.size()) +
                        " beliefs for a graph of " +
                        std::to_string(graph->node_count()) + " nodes");
    }
    for (std::uint32_t i = 0; i < graph->node_count(); ++i) {
      const std::uint32_t d = graph->degree(i);
      if (d >= degree_lo && d <= degree_hi) {
        pooled.push_back(trial[i]);
      }
    }
  }
  if (pooled.empty()) {
    throw ConfigError("belief_histogram: selection is empty");
  }

  double lo = pooled[0];
  double hi = pooled[0];
  for (const double v : pooled) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }

  BeliefHistogram hist;
  hist.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::uint32_t b = 0; b <= bins; ++b) {
    hist.edges[b] = lo + width * static_cast<double>(b);
  }
  hist.edges[bins] = hi;
  hist.counts.assign(bins, 0);
  for (const double v : pooled) {
    auto idx = static_cast<std::int64_t>((v - lo) / width);
    idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
    ++hist.counts[static_cast<std::size_t>(idx)];
  }
  return hist;
}

std::uint32_t count_modes(const std::vector<std::uint64_t>& counts,
                          double min_rel_height, double merge_ratio) {
  const std::size_t m = counts.size();
  if (m == 0) {
    return 0;
  }
  std::vector<double> smooth(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = (i >= 2) ? i - 2 : 0;
    const std::size_t b = std::min(i + 2, m - 1);
    double sum = 0.0;
    for (std::size_t j = a; j <= b; ++j) {
      sum += static_cast<double>(counts[j]);
    }
    smooth[i] = sum / static_cast<double>(b - a + 1);
  }
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  const double floor = min_rel_height * peak;

  std::vector<std::size_t> peaks;
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && smooth[j + 1] == smooth[i]) {
      ++j;
    }
    // Plateau [i, j]; beyond either end the value is taken as -inf.
    const bool above_left = (i == 0) || smooth[i - 1] < smooth[i];
    const bool above_right = (j == m - 1) || smooth[j + 1] < smooth[i];
    if (above_left && above_right && smooth[i] >= floor) {
      peaks.push_back(i);
    }
    i = j + 1;
  }

  // Candidates without a qualifying dip between them belong to one mode. The
  // pair whose valley clears its threshold by the most merges first, and the
  // lower candidate is dropped (the left one on equal heights); repeat until
  // every remaining adjacent pair is separated by a dip.
  while (peaks.size() > 1) {
    std::size_t drop = peaks.size();
    double best_excess = 0.0;
    bool found = false;
    for (std::size_t p = 0; p + 1 < peaks.size(); ++p) {
      const std::size_t a = peaks[p];
      const std::size_t b = peaks[p + 1];
      double valley = smooth[a];
      for (std::size_t q = a; q <= b; ++q) {
        valley = std::min(valley, smooth[q]);
      }
      const double limit = merge_ratio * std::min(smooth[a], smooth[b]);
      const double excess = valley - limit;
      if (valley >= limit && (!found || excess > best_excess)) {
        found = true;
        best_excess = excess;
        drop = (smooth[a] <= smooth[b]) ? p : p + 1;
      }
    }
    if (!found) {
      break;
    }
    peaks.erase(peaks.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return static_cast<std::uint32_t>(peaks.size());
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    // Ties share the mean of the 1-based ranks they span.
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = shared;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw ConfigError("spearman: input sizes differ");
  }
  if (x.size() < 2) {
    throw ConfigError("spearman: needs at least two points");
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace opinet
