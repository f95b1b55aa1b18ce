#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "opinet/graph.hpp"

namespace opinet {

enum class InferenceMode {
  BP,         // loop correction 1, gain 1
  CBP,        // per-edge corrections and per-node gains from ControlParams
  MeanField,  // correction 0, gain 1, linearized transfer
};

const char* mode_name(InferenceMode mode);

namespace detail {

// Keeps atanh away from its poles; limits message magnitude to about 17.66.
inline constexpr double kAtanhClamp = 1.0 - 1e-15;

// Both transfers are evaluated on magnitudes with the product sign applied
// afterwards, which makes them odd bitwise: negating the inputs of a sweep
// negates every message and belief it produces exactly.
inline double pairwise_cavity(double x, double w) {
  double t = std::fabs(w) * std::tanh(std::fabs(x));
  if (t > kAtanhClamp) {
    t = kAtanhClamp;
  }
  const double r = std::atanh(t);
  return (std::signbit(x) != std::signbit(w)) ? -r : r;
}

inline double mean_field_cavity(double x, double w) {
  const double r = std::fabs(w) * std::tanh(std::fabs(x));
  return (std::signbit(x) != std::signbit(w)) ? -r : r;
}

}  // namespace detail

// Message update f(x) = atanh(tanh(j) tanh(x)). |f(x)| < |j| for every x
// whose tanh stays below 1 in doubles (|x| < 19 or so); once tanh(x) rounds
// to exactly 1 the result is atanh(tanh(j)), which may sit one ulp above j.
inline double coupling_fn(double x, double j) {
  return detail::pairwise_cavity(x, std::tanh(j));
}

// Mean-field counterpart g(x) = tanh(j) tanh(x).
inline double mean_field_fn(double x, double j) {
  return detail::mean_field_cavity(x, std::tanh(j));
}

// p(yes) = 1 / (1 + exp(-2 b)).
inline double belief_to_probability(double belief) {
  return 1.0 / (1.0 + std::exp(-2.0 * belief));
}

// Per-edge loop corrections and per-node gains steering the updates.
struct ControlParams {
  std::vector<double> alpha;  // one per undirected edge, in edge order
  std::vector<double> kappa;  // one per node

  static ControlParams bp_defaults(std::uint32_t edge_count,
                                   std::uint32_t node_count);

  // Checks sizes against the graph and that every entry is finite and >= 0.
  void validate(const SocialGraph& graph) const;
};

struct ScheduleConfig {
  double tau = 0.2;               // damping step in (0, 1]; 1 is undamped
  std::uint32_t iterations = 100;
  double early_stop_eps = 0.0;    // stop when max |dM| <= eps; 0 disables
  bool record_trajectory = false;
  std::uint32_t workers = 1;

  void validate() const;
};

struct PropagationState {
  std::vector<double> messages;  // slot order, see SocialGraph
  std::vector<double> beliefs;
  std::uint32_t iterations_run = 0;
  double last_max_delta = std::numeric_limits<double>::infinity();
  bool converged = false;
  // Beliefs before any sweep and after each executed sweep, when recorded.
  std::vector<std::vector<double>> trajectory;
};

// Slot-indexed expansion of couplings and control parameters. BP and
// mean-field ignore the passed ControlParams and install their fixed values,
// so a CBP plan with alpha = kappa = 1 runs the exact same arithmetic as BP.
struct SlotPlan {
  const SocialGraph* graph = nullptr;
  InferenceMode mode = InferenceMode::BP;
  std::vector<double> w_slot;      // tanh(J) of the edge under each slot
  std::vector<double> alpha_slot;  // correction applied to the reverse message
  std::vector<double> kappa;

  static SlotPlan build(const SocialGraph& graph, const Couplings& couplings,
                        const ControlParams& params, InferenceMode mode);
};

// One synchronous sweep: every slot s (message neighbors()[s] -> owner) gets
//   m_out[s] = (1 - tau) m_in[s]
//            + tau f(b_in[sender] - alpha_slot[s] m_in[reverse_slot(s)])
// and beliefs are then rebuilt as kappa_i (sum of incoming m_out + ext_i).
// messages_out must not alias messages_in; beliefs_out may alias beliefs_in.
// Returns max |m_out - m_in|. Throws NumericError on a non-finite message or
// belief, naming the edge or node and the (1-based) sweep number.
double step(const SlotPlan& plan, const std::vector<double>& external,
            const std::vector<double>& messages_in,
            const std::vector<double>& beliefs_in,
            std::vector<double>& messages_out, std::vector<double>& beliefs_out,
            double tau, std::uint32_t sweep, std::uint32_t workers);

// Iterates step() from zero messages and beliefs kappa_i * ext_i. Running out
// of iterations without meeting early_stop_eps is not an error; the caller
// reads converged / last_max_delta if it cares.
PropagationState run(const SocialGraph& graph, const Couplings& couplings,
                     const std::vector<double>& external,
                     const ControlParams& params,
                     const ScheduleConfig& schedule, InferenceMode mode);

}  // namespace opinet
