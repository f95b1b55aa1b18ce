#include "opinet/learning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opinet/common.hpp"

namespace opinet {

namespace {

void validate_trials(const SocialGraph& graph,
                     const std::vector<TrainingTrial>& trials) {
  if (trials.empty()) {
    throw ConfigError("training: no trials");
  }
  for (const auto& trial : trials) {
    if (trial.external.size() != graph.node_count()) {
      throw ConfigError("training: trial external field size does not match "
                        "the node count");
    }
    for (const double m : trial.external) {
      if (!std::isfinite(m)) {
        throw ConfigError("training: non-finite external message");
      }
    }
    if (trial.target_p.size() != graph.node_count()) {
      throw ConfigError("training: trial target size does not match the node "
                        "count");
    }
    for (const double p : trial.target_p) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("training: target probabilities must lie in [0, 1]");
      }
    }
  }
}

// Messages and beliefs before any sweep and after each of the T sweeps.
struct UnrolledRun {
  std::vector<std::vector<double>> messages;
  std::vector<std::vector<double>> beliefs;
};

UnrolledRun unroll(const SlotPlan& plan, const std::vector<double>& external,
                   const ScheduleConfig& schedule) {
  const SocialGraph& graph = *plan.graph;
  const std::uint32_t n = graph.node_count();
  UnrolledRun out;
  out.messages.resize(schedule.iterations + 1);
  out.beliefs.resize(schedule.iterations + 1);
  out.messages[0].assign(graph.slot_count(), 0.0);
  out.beliefs[0].resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    out.beliefs[0][i] = plan.kappa[i] * external[i];
  }
  for (std::uint32_t t = 1; t <= schedule.iterations; ++t) {
    out.messages[t].resize(graph.slot_count());
    out.beliefs[t].resize(n);
    step(plan, external, out.messages[t - 1], out.beliefs[t - 1],
         out.messages[t], out.beliefs[t], schedule.tau, t, schedule.workers);
  }
  return out;
}

// d/dx of the pairwise transfer; zero in the clamped regime.
double transfer_derivative(double cavity, double w) {
  const double t = std::tanh(std::fabs(cavity));
  const double y = std::fabs(w) * t;
  if (y > detail::kAtanhClamp) {
    return 0.0;
  }
  return w * (1.0 - t * t) / (1.0 - y * y);
}

}  // namespace

void SupervisedConfig::validate() const {
  if (steps == 0) {
    throw ConfigError("supervised: steps must be >= 1");
  }
  if (batch_size == 0) {
    throw ConfigError("supervised: batch_size must be >= 1");
  }
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
    throw ConfigError("supervised: learning_rate must be positive");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("supervised: Adam betas must lie in [0, 1)");
  }
  if (!std::isfinite(adam_eps) || adam_eps <= 0.0) {
    throw ConfigError("supervised: adam_eps must be positive");
  }
  if (!std::isfinite(fd_step) || fd_step <= 0.0) {
    throw ConfigError("supervised: fd_step must be positive");
  }
  if (eval_every == 0) {
    throw ConfigError("supervised: eval_every must be >= 1");
  }
  if (!std::isfinite(param_hi) || param_lo < 0.0 || param_hi <= param_lo) {
    throw ConfigError("supervised: parameter box must satisfy 0 <= lo < hi");
  }
  if (param_lo > 1.0 || param_hi < 1.0) {
    throw ConfigError("supervised: parameter box must contain the start "
                      "point (1, 1)");
  }
  schedule.validate();
  if (schedule.early_stop_eps != 0.0) {
    throw ConfigError("supervised: training unrolls a fixed number of "
                      "sweeps; early_stop_eps must be 0");
  }
}

double supervised_loss(const SocialGraph& graph, const Couplings& couplings,
                       const ControlParams& params,
                       const std::vector<TrainingTrial>& trials,
                       const ScheduleConfig& schedule) {
  validate_trials(graph, trials);
  double total = 0.0;
  for (const auto& trial : trials) {
    const PropagationState state = run(graph, couplings, trial.external,
                                       params, schedule, InferenceMode::CBP);
    for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
      const double d =
          belief_to_probability(state.beliefs[i]) - trial.target_p[i];
      total += 2.0 * d * d;
    }
  }
  return total;
}

void supervised_gradient(const SocialGraph& graph, const Couplings& couplings,
                         const ControlParams& params,
                         const std::vector<TrainingTrial>& trials,
                         const ScheduleConfig& schedule,
                         std::vector<double>& grad_alpha,
                         std::vector<double>& grad_kappa) {
  schedule.validate();
  validate_trials(graph, trials);
  const SlotPlan plan =
      SlotPlan::build(graph, couplings, params, InferenceMode::CBP);
  const std::uint32_t n = graph.node_count();
  const std::size_t n_slots = graph.slot_count();
  const auto& nbr = graph.neighbors();
  const auto& rev = graph.reverse_slot();
  const auto& off = graph.offsets();
  const auto& slot_edge = graph.slot_edge();
  const double tau = schedule.tau;
  const std::uint32_t last = schedule.iterations;

  grad_alpha.assign(graph.edge_count(), 0.0);
  grad_kappa.assign(n, 0.0);
  std::vector<double> gb(n);
  std::vector<double> gb_prev(n);
  std::vector<double> gm(n_slots);
  std::vector<double> gm_prev(n_slots);

  for (const auto& trial : trials) {
    const UnrolledRun states = unroll(plan, trial.external, schedule);

    // Loss layer: L = sum_i 2 (b - p)^2 with b = sigmoid(2 B).
    for (std::uint32_t i = 0; i < n; ++i) {
      const double b = belief_to_probability(states.beliefs[last][i]);
      gb[i] = 8.0 * (b - trial.target_p[i]) * b * (1.0 - b);
    }
    std::fill(gm.begin(), gm.end(), 0.0);

    for (std::uint32_t t = last; t >= 1; --t) {
      const auto& m_cur = states.messages[t];
      const auto& m_prev = states.messages[t - 1];
      const auto& b_prev = states.beliefs[t - 1];

      // Belief layer: B_i = kappa_i (sum of incoming messages + ext_i).
      for (std::uint32_t i = 0; i < n; ++i) {
        double incoming = 0.0;
        for (std::uint32_t s = off[i]; s < off[i + 1]; ++s) {
          incoming += m_cur[s];
        }
        grad_kappa[i] += gb[i] * (incoming + trial.external[i]);
        const double flow = gb[i] * plan.kappa[i];
        for (std::uint32_t s = off[i]; s < off[i + 1]; ++s) {
          gm[s] += flow;
        }
      }

      // Message layer: m = (1 - tau) m_prev + tau f(b_prev - alpha m_rev).
      std::fill(gb_prev.begin(), gb_prev.end(), 0.0);
      std::fill(gm_prev.begin(), gm_prev.end(), 0.0);
      for (std::size_t s = 0; s < n_slots; ++s) {
        const double g = gm[s];
        gm_prev[s] += (1.0 - tau) * g;
        const double m_rev = m_prev[rev[s]];
        const double cavity = b_prev[nbr[s]] - plan.alpha_slot[s] * m_rev;
        const double h =
            tau * g * transfer_derivative(cavity, plan.w_slot[s]);
        gb_prev[nbr[s]] += h;
        grad_alpha[slot_edge[s]] -= h * m_rev;
        gm_prev[rev[s]] -= h * plan.alpha_slot[s];
      }
      gb.swap(gb_prev);
      gm.swap(gm_prev);
    }

    // Initial beliefs are kappa_i * ext_i; initial messages are constant 0.
    for (std::uint32_t i = 0; i < n; ++i) {
      grad_kappa[i] += gb[i] * trial.external[i];
    }
  }
}

void supervised_gradient_fd(const SocialGraph& graph,
                            const Couplings& couplings,
                            const ControlParams& params,
                            const std::vector<TrainingTrial>& trials,
                            const ScheduleConfig& schedule, double h,
                            std::vector<double>& grad_alpha,
                            std::vector<double>& grad_kappa) {
  if (!std::isfinite(h) || h <= 0.0) {
    throw ConfigError("supervised: fd step must be positive");
  }
  grad_alpha.assign(graph.edge_count(), 0.0);
  grad_kappa.assign(graph.node_count(), 0.0);
  ControlParams probe = params;
  const double base = supervised_loss(graph, couplings, probe, trials,
                                      schedule);
  auto derive = [&](double& slot, double& out) {
    const double theta = slot;
    slot = theta + h;
    const double up = supervised_loss(graph, couplings, probe, trials,
                                      schedule);
    if (theta - h < 0.0) {
      // One-sided at the boundary so the probe never goes negative.
      out = (up - base) / h;
    } else {
      slot = theta - h;
      const double down = supervised_loss(graph, couplings, probe, trials,
                                          schedule);
      out = (up - down) / (2.0 * h);
    }
    slot = theta;
  };
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    derive(probe.alpha[e], grad_alpha[e]);
  }
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    derive(probe.kappa[i], grad_kappa[i]);
  }
}

SupervisedResult train_supervised(const SocialGraph& graph,
                                  const Couplings& couplings,
                                  const std::vector<TrainingTrial>& trials,
                                  const SupervisedConfig& config) {
  config.validate();
  validate_trials(graph, trials);
  const std::uint32_t n_edges = graph.edge_count();
  const std::uint32_t n = graph.node_count();
  ControlParams params = ControlParams::bp_defaults(n_edges, n);

  SupervisedResult result;
  result.params = params;
  result.initial_loss =
      supervised_loss(graph, couplings, params, trials, config.schedule);
  result.best_loss = result.initial_loss;
  result.loss_history.push_back(result.initial_loss);

  const std::size_t dim = static_cast<std::size_t>(n_edges) + n;
  std::vector<double> adam_m(dim, 0.0);
  std::vector<double> adam_v(dim, 0.0);
  std::vector<double> ga;
  std::vector<double> gk;
  std::vector<TrainingTrial> batch;
  std::size_t cursor = 0;

  for (std::uint32_t stepi = 1; stepi <= config.steps; ++stepi) {
    batch.clear();
    for (std::uint32_t b = 0; b < config.batch_size; ++b) {
      batch.push_back(trials[cursor]);
      cursor = (cursor + 1) % trials.size();
    }
    if (config.gradient == GradientKind::Analytic) {
      supervised_gradient(graph, couplings, params, batch, config.schedule,
                          ga, gk);
    } else {
      supervised_gradient_fd(graph, couplings, params, batch, config.schedule,
                             config.fd_step, ga, gk);
    }

    const double corr1 = 1.0 - std::pow(config.adam_beta1, stepi);
    const double corr2 = 1.0 - std::pow(config.adam_beta2, stepi);
    for (std::size_t d = 0; d < dim; ++d) {
      const double g = (d < n_edges) ? ga[d] : gk[d - n_edges];
      adam_m[d] = config.adam_beta1 * adam_m[d] +
                  (1.0 - config.adam_beta1) * g;
      adam_v[d] = config.adam_beta2 * adam_v[d] +
                  (1.0 - config.adam_beta2) * g * g;
      const double update = config.learning_rate * (adam_m[d] / corr1) /
                            (std::sqrt(adam_v[d] / corr2) + config.adam_eps);
      double& theta =
          (d < n_edges) ? params.alpha[d] : params.kappa[d - n_edges];
      theta = std::clamp(theta - update, config.param_lo, config.param_hi);
    }
    result.steps_run = stepi;

    if (stepi % config.eval_every == 0 || stepi == config.steps) {
      const double full =
          supervised_loss(graph, couplings, params, trials, config.schedule);
      result.loss_history.push_back(full);
      if (full < result.best_loss) {
        result.best_loss = full;
        result.params = params;
      }
    }
  }
  return result;
}

void UnsupervisedConfig::validate() const {
  if (!std::isfinite(rate_alpha) || rate_alpha <= 0.0) {
    throw ConfigError("unsupervised: rate_alpha must be positive");
  }
  if (!std::isfinite(rate_kappa) || rate_kappa <= 0.0) {
    throw ConfigError("unsupervised: rate_kappa must be positive");
  }
  if (!std::isfinite(param_ceiling) || param_ceiling <= 0.0) {
    throw ConfigError("unsupervised: param_ceiling must be positive");
  }
  schedule.validate();
}

double alpha_increment(double message, double belief, double alpha) {
  return message * (belief - alpha * message);
}

double kappa_increment(double belief, double sum_sq_messages, double ext) {
  return -(belief * belief - sum_sq_messages - ext * ext);
}

UnsupervisedResult train_unsupervised(
    const SocialGraph& graph, const Couplings& couplings,
    const std::vector<std::vector<double>>& externals,
    const UnsupervisedConfig& config) {
  config.validate();
  if (externals.empty()) {
    throw ConfigError("training: no trials");
  }
  for (const auto& ext : externals) {
    if (ext.size() != graph.node_count()) {
      throw ConfigError("training: trial external field size does not match "
                        "the node count");
    }
    for (const double m : ext) {
      if (!std::isfinite(m)) {
        throw ConfigError("training: non-finite external message");
      }
    }
  }

  const std::uint32_t n = graph.node_count();
  const std::size_t n_slots = graph.slot_count();
  const auto& off = graph.offsets();
  const auto& owner = graph.slot_owner();
  const auto& slot_edge = graph.slot_edge();
  ControlParams params = ControlParams::bp_defaults(graph.edge_count(), n);

  const std::size_t n_trials = externals.size();
  const std::size_t snapshot_at = n_trials * 9 / 10;
  ControlParams snapshot = params;
  std::vector<double> drive(graph.edge_count());

  for (std::size_t t = 0; t < n_trials; ++t) {
    if (t == snapshot_at) {
      snapshot = params;
    }
    const PropagationState state = run(graph, couplings, externals[t], params,
                                       config.schedule, InferenceMode::CBP);
    const double decay = 1.0 / std::sqrt(static_cast<double>(t + 1));

    // Each undirected edge averages the drives of its two directions.
    std::fill(drive.begin(), drive.end(), 0.0);
    for (std::size_t s = 0; s < n_slots; ++s) {
      const std::uint32_t e = slot_edge[s];
      drive[e] += alpha_increment(state.messages[s], state.beliefs[owner[s]],
                                  params.alpha[e]);
    }
    for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
      params.alpha[e] = std::max(
          0.0, params.alpha[e] + config.rate_alpha * decay * 0.5 * drive[e]);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      double ssq = 0.0;
      for (std::uint32_t s = off[i]; s < off[i + 1]; ++s) {
        ssq += state.messages[s] * state.messages[s];
      }
      const double inc =
          kappa_increment(state.beliefs[i], ssq, externals[t][i]);
      params.kappa[i] =
          std::max(0.0, params.kappa[i] + config.rate_kappa * decay * inc);
    }

    for (const double a : params.alpha) {
      if (a > config.param_ceiling) {
        throw NumericError("unsupervised: alpha exceeded " +
                           std::to_string(config.param_ceiling) +
                           " after trial " + std::to_string(t + 1) +
                           "; use smaller learning rates");
      }
    }
    for (const double k : params.kappa) {
      if (k > config.param_ceiling) {
        throw NumericError("unsupervised: kappa exceeded " +
                           std::to_string(config.param_ceiling) +
                           " after trial " + std::to_string(t + 1) +
                           "; use smaller learning rates");
      }
    }
  }

  UnsupervisedResult out;
  out.params = params;
  out.trials_run = static_cast<std::uint32_t>(n_trials);
  auto settled = [](const std::vector<double>& now,
                    const std::vector<double>& before) {
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
      diff = std::max(diff, std::fabs(now[i] - before[i]));
      scale = std::max(scale, std::fabs(now[i]));
    }
    return diff < 0.01 * std::max(scale, 1e-12);
  };
  out.alpha_settled = settled(params.alpha, snapshot.alpha);
  out.kappa_settled = settled(params.kappa, snapshot.kappa);
  return out;
}

}  // namespace opinet
