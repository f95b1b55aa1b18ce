#include "opinet/engine.hpp"

#include <cmath>
#include <string>

#include "opinet/common.hpp"
#include "opinet/parallel.hpp"

namespace opinet {

const char* mode_name(InferenceMode mode) {
  switch (mode) {
    case InferenceMode::BP:
      return "bp";
    case InferenceMode::CBP:
      return "cbp";
    case InferenceMode::MeanField:
      return "mean_field";
  }
  return "unknown";
}

ControlParams ControlParams::bp_defaults(std::uint32_t edge_count,
                                         std::uint32_t node_count) {
  ControlParams params;
  params.alpha.assign(edge_count, 1.0);
  params.kappa.assign(node_count, 1.0);
  return params;
}

void ControlParams::validate(const SocialGraph& graph) const {
  if (alpha.size() != graph.edge_count()) {
    throw ConfigError("control params: alpha size " +
                      std::to_string(alpha.size()) +
                      " does not match edge count " +
                      std::to_string(graph.edge_count()));
  }
  if (kappa.size() != graph.node_count()) {
    throw ConfigError("control params: kappa size " +
                      std::to_string(kappa.size()) +
                      " does not match node count " +
                      std::to_string(graph.node_count()));
  }
  for (const double a : alpha) {
    if (!std::isfinite(a) || a < 0.0) {
      throw ConfigError("control params: alpha entries must be finite and >= 0");
    }
  }
  for (const double k : kappa) {
    if (!std::isfinite(k) || k < 0.0) {
      throw ConfigError("control params: kappa entries must be finite and >= 0");
    }
  }
}

void ScheduleConfig::validate() const {
  if (!std::isfinite(tau) || tau <= 0.0 || tau > 1.0) {
    throw ConfigError("schedule: tau must lie in (0, 1]");
  }
  if (iterations == 0) {
    throw ConfigError("schedule: iterations must be >= 1");
  }
  if (!std::isfinite(early_stop_eps) || early_stop_eps < 0.0) {
    throw ConfigError("schedule: early_stop_eps must be finite and >= 0");
  }
  if (workers == 0) {
    throw ConfigError("schedule: workers must be >= 1");
  }
}

SlotPlan SlotPlan::build(const SocialGraph& graph, const Couplings& couplings,
                         const ControlParams& params, InferenceMode mode) {
  if (couplings.size() != graph.edge_count()) {
    throw ConfigError("couplings size " + std::to_string(couplings.size()) +
                      " does not match edge count " +
                      std::to_string(graph.edge_count()));
  }
  for (const double j : couplings) {
    if (!std::isfinite(j)) {
      throw ConfigError("non-finite coupling");
    }
  }

  SlotPlan plan;
  plan.graph = &graph;
  plan.mode = mode;
  const std::size_t n_slots = graph.slot_count();
  const auto& slot_edge = graph.slot_edge();
  plan.w_slot.resize(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    plan.w_slot[s] = std::tanh(couplings[slot_edge[s]]);
  }
  switch (mode) {
    case InferenceMode::BP:
      plan.alpha_slot.assign(n_slots, 1.0);
      plan.kappa.assign(graph.node_count(), 1.0);
      break;
    case InferenceMode::MeanField:
      plan.alpha_slot.assign(n_slots, 0.0);
      plan.kappa.assign(graph.node_count(), 1.0);
      break;
    case InferenceMode::CBP:
      params.validate(graph);
      plan.alpha_slot.resize(n_slots);
      for (std::size_t s = 0; s < n_slots; ++s) {
        plan.alpha_slot[s] = params.alpha[slot_edge[s]];
      }
      plan.kappa = params.kappa;
      break;
  }
  return plan;
}

double step(const SlotPlan& plan, const std::vector<double>& external,
            const std::vector<double>& messages_in,
            const std::vector<double>& beliefs_in,
            std::vector<double>& messages_out, std::vector<double>& beliefs_out,
            double tau, std::uint32_t sweep, std::uint32_t workers) {
  const SocialGraph& graph = *plan.graph;
  const std::size_t n_slots = plan.w_slot.size();
  const std::uint32_t n = graph.node_count();
  const std::uint32_t* nbr = graph.neighbors().data();
  const std::uint32_t* rev = graph.reverse_slot().data();
  const double* w = plan.w_slot.data();
  const double* alpha = plan.alpha_slot.data();
  const double* m_in = messages_in.data();
  const double* b_in = beliefs_in.data();
  double* m_out = messages_out.data();
  const double keep = 1.0 - tau;

  // 1) Message phase. Each chunk records its own max step size so the
  //    reduction order is fixed regardless of worker count.
  std::vector<double> chunk_delta(chunk_count(n_slots), 0.0);
  const bool mean_field = plan.mode == InferenceMode::MeanField;
  parallel_for(n_slots, workers,
               [&](std::size_t begin, std::size_t end, std::size_t chunk) {
                 double local = 0.0;
                 if (mean_field) {
                   for (std::size_t s = begin; s < end; ++s) {
                     const double cavity =
                         b_in[nbr[s]] - alpha[s] * m_in[rev[s]];
                     const double next =
                         keep * m_in[s] +
                         tau * detail::mean_field_cavity(cavity, w[s]);
                     m_out[s] = next;
                     local = std::max(local, std::fabs(next - m_in[s]));
                   }
                 } else {
                   for (std::size_t s = begin; s < end; ++s) {
                     const double cavity =
                         b_in[nbr[s]] - alpha[s] * m_in[rev[s]];
                     const double next =
                         keep * m_in[s] +
                         tau * detail::pairwise_cavity(cavity, w[s]);
                     m_out[s] = next;
                     local = std::max(local, std::fabs(next - m_in[s]));
                   }
                 }
                 chunk_delta[chunk] = local;
               });
  for (std::size_t s = 0; s < n_slots; ++s) {
    if (!std::isfinite(m_out[s])) {
      throw NumericError("non-finite message on edge " +
                         std::to_string(nbr[s]) + "->" +
                         std::to_string(graph.slot_owner()[s]) +
                         " at iteration " + std::to_string(sweep));
    }
  }

  // 2) Belief phase, gathering each node's incoming slots in ascending order.
  const std::uint32_t* off = graph.offsets().data();
  const double* kappa = plan.kappa.data();
  const double* ext = external.data();
  double* b_out = beliefs_out.data();
  parallel_for(n, workers,
               [&](std::size_t begin, std::size_t end, std::size_t) {
                 for (std::size_t i = begin; i < end; ++i) {
                   double sum = 0.0;
                   for (std::uint32_t s = off[i]; s < off[i + 1]; ++s) {
                     sum += m_out[s];
                   }
                   b_out[i] = kappa[i] * (sum + ext[i]);
                 }
               });
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!std::isfinite(b_out[i])) {
      throw NumericError("non-finite belief at node " + std::to_string(i) +
                         " at iteration " + std::to_string(sweep));
    }
  }

  double max_delta = 0.0;
  for (const double d : chunk_delta) {
    max_delta = std::max(max_delta, d);
  }
  return max_delta;
}

PropagationState run(const SocialGraph& graph, const Couplings& couplings,
                     const std::vector<double>& external,
                     const ControlParams& params,
                     const ScheduleConfig& schedule, InferenceMode mode) {
  schedule.validate();
  if (external.size() != graph.node_count()) {
    throw ConfigError("external field size " +
                      std::to_string(external.size()) +
                      " does not match node count " +
                      std::to_string(graph.node_count()));
  }
  for (const double m : external) {
    if (!std::isfinite(m)) {
      throw ConfigError("non-finite external message");
    }
  }
  const SlotPlan plan = SlotPlan::build(graph, couplings, params, mode);

  PropagationState state;
  const std::size_t n_slots = graph.slot_count();
  const std::uint32_t n = graph.node_count();
  state.messages.assign(n_slots, 0.0);
  state.beliefs.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    state.beliefs[i] = plan.kappa[i] * external[i];
  }
  if (schedule.record_trajectory) {
    state.trajectory.push_back(state.beliefs);
  }

  std::vector<double> msg_next(n_slots);
  std::vector<double> bel_next(n);
  for (std::uint32_t t = 0; t < schedule.iterations; ++t) {
    const double delta =
        step(plan, external, state.messages, state.beliefs, msg_next, bel_next,
             schedule.tau, t + 1, schedule.workers);
    state.messages.swap(msg_next);
    state.beliefs.swap(bel_next);
    state.iterations_run = t + 1;
    state.last_max_delta = delta;
    if (schedule.record_trajectory) {
      state.trajectory.push_back(state.beliefs);
    }
    if (schedule.early_stop_eps > 0.0 && delta <= schedule.early_stop_eps) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace opinet
