#pragma once

#include <cstdint>
#include <vector>

#include "opinet/engine.hpp"
#include "opinet/graph.hpp"

namespace opinet {

// One supervised example: an external field and the per-node p(yes) the
// trained propagation should reproduce.
struct TrainingTrial {
  std::vector<double> external;
  std::vector<double> target_p;
};

enum class GradientKind { Analytic, FiniteDifference };

struct SupervisedConfig {
  std::uint32_t steps = 400;
  std::uint32_t batch_size = 10;  // trials per update, taken cyclically
  double learning_rate = 0.05;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  GradientKind gradient = GradientKind::Analytic;
  double fd_step = 1e-4;
  std::uint32_t eval_every = 20;  // checkpoint period, in steps
  double param_lo = 0.0;          // box the parameters are projected into
  double param_hi = 10.0;
  ScheduleConfig schedule;        // early_stop_eps must stay 0

  void validate() const;
};

struct SupervisedResult {
  ControlParams params;  // best checkpoint by full-training loss
  double initial_loss = 0.0;
  double best_loss = 0.0;
  std::vector<double> loss_history;  // one entry per checkpoint
  std::uint32_t steps_run = 0;
};

// Sum over trials and nodes of (b - p)^2 for both spin values, which is
// 2 (b_yes - p_yes)^2 per node.
double supervised_loss(const SocialGraph& graph, const Couplings& couplings,
                       const ControlParams& params,
                       const std::vector<TrainingTrial>& trials,
                       const ScheduleConfig& schedule);

// Exact gradient of supervised_loss, obtained by unrolling the damped sweeps
// and running the chain rule backwards through the stored states.
void supervised_gradient(const SocialGraph& graph, const Couplings& couplings,
                         const ControlParams& params,
                         const std::vector<TrainingTrial>& trials,
                         const ScheduleConfig& schedule,
                         std::vector<double>& grad_alpha,
                         std::vector<double>& grad_kappa);

// Central-difference reference for the gradient; one-sided where a parameter
// sits closer than h to zero. Costs two full losses per parameter.
void supervised_gradient_fd(const SocialGraph& graph,
                            const Couplings& couplings,
                            const ControlParams& params,
                            const std::vector<TrainingTrial>& trials,
                            const ScheduleConfig& schedule, double h,
                            std::vector<double>& grad_alpha,
                            std::vector<double>& grad_kappa);

// Adam descent on (alpha, kappa) from the all-ones start. Parameters are
// projected into [param_lo, param_hi] after every update, and the returned
// params are the best full-training-loss checkpoint, so they are never worse
// than the start point.
SupervisedResult train_supervised(const SocialGraph& graph,
                                  const Couplings& couplings,
                                  const std::vector<TrainingTrial>& trials,
                                  const SupervisedConfig& config);

struct UnsupervisedConfig {
  double rate_alpha = 1e-2;
  double rate_kappa = 1e-3;
  double param_ceiling = 10.0;  // exceeding this aborts the run
  ScheduleConfig schedule;

  void validate() const;
};

struct UnsupervisedResult {
  ControlParams params;
  std::uint32_t trials_run = 0;
  // True when the max-norm change over the last tenth of the trials stayed
  // below 1% of the parameter scale.
  bool alpha_settled = false;
  bool kappa_settled = false;
};

// Directed drive M (B - alpha M) for one incoming message; an edge update
// averages the drives of its two directions.
double alpha_increment(double message, double belief, double alpha);

// Gain drive -(B^2 - sum of squared incoming messages - ext^2).
double kappa_increment(double belief, double sum_sq_messages, double ext);

// Streams the trials one at a time (no batching), applying the local rules
// to the final state of each propagation with step sizes rate / sqrt(t).
// Parameters are clamped at zero from below; crossing param_ceiling raises
// NumericError since it means the rates are too large for the graph.
UnsupervisedResult train_unsupervised(
    const SocialGraph& graph, const Couplings& couplings,
    const std::vector<std::vector<double>>& externals,
    const UnsupervisedConfig& config);

}  // namespace opinet
