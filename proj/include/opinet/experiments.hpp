#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opinet/engine.hpp"
#include "opinet/graph.hpp"
#include "opinet/io.hpp"
#include "opinet/stimuli.hpp"

namespace opinet {

// Seed stream tags. They sit above 2^32 so the structural streams can never
// collide with the evaluation stream, whose second argument is a graph id
// and third a trial label, both far below 2^32.
inline constexpr std::uint64_t kSeedTagGraph = 0x100000001ull;
inline constexpr std::uint64_t kSeedTagCouplings = 0x100000002ull;
inline constexpr std::uint64_t kSeedTagTraining = 0x100000003ull;

// Flat configuration for every experiment kind. Unused keys are simply
// ignored by the drivers that do not need them, but unknown keys are
// rejected at parse time.
struct ExperimentConfig {
  std::string experiment = "battery";  // battery | sweep | dose | degree
  std::string out_dir;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;

  // Graph source. graph_file wins over generation when set; the value
  // "auto:facebook" resolves $OPINET_FACEBOOK_EDGELIST and then
  // data/facebook_combined.txt.
  std::uint32_t n = 10;
  std::uint32_t k = 4;
  double beta = 0.1;
  std::string graph_file;
  std::uint32_t subgraph_nodes = 0;  // 0 keeps the whole file

  double j_max = 0.6;
  double sigma_ext = 1.0;

  double tau = 0.2;
  std::uint32_t iterations = 100;

  std::uint32_t n_graphs = 30;
  std::uint32_t n_trials = 100;
  std::uint32_t hist_bins = 41;
  std::uint32_t hist_degree_lo = 0;
  std::uint32_t hist_degree_hi = 0xffffffffu;  // inclusive band

  std::string training = "unsupervised";  // none|supervised|unsupervised|both
  std::uint32_t sup_trials = 300;
  std::uint32_t sup_steps = 400;
  std::uint32_t sup_batch = 10;
  double sup_rate = 0.05;
  std::uint32_t sup_eval_every = 20;
  std::uint32_t unsup_trials = 2000;
  double unsup_rate_alpha = 1e-2;
  double unsup_rate_kappa = 1e-3;

  std::vector<std::uint32_t> k_values;  // sweep grid
  std::vector<double> beta_values;
  std::vector<double> informed_pct;  // dose curve, percentages in (0, 100]
  double informed_bias = 0.05;
  double informed_sigma = 0.05;

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& flat);
};

// Ready-made configurations for the study setups. Throws ConfigError for an
// unknown name.
nlohmann::json preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Subgraph induced by the first max_nodes vertices a breadth-first search
// from root reaches, with surviving nodes renumbered in ascending old-id
// order.
SocialGraph induced_subgraph_bfs(const SocialGraph& graph, std::uint32_t root,
                                 std::uint32_t max_nodes);

struct BatteryOutput {
  std::vector<TrialSummary> trials;
  std::vector<std::vector<double>> beliefs;  // per trial
};

// Evaluates n_trials stimuli under one mode. The field of trial t depends
// only on (seed, g_id, trial_offset + t), so every mode sees identical
// stimuli and trials stay paired across modes. For informative stimuli the
// bias side is a fresh coin flip per trial; for uninformative ones the
// correct answer is the sign of the universal observer's belief.
BatteryOutput run_battery(const SocialGraph& graph, const Couplings& couplings,
                          const ControlParams& params, InferenceMode mode,
                          const ScheduleConfig& schedule,
                          const StimulusSpec& spec, std::uint32_t n_trials,
                          std::uint64_t seed, std::uint64_t g_id,
                          std::uint64_t trial_offset = 0);

// Runs the configured experiment and writes CSVs plus provenance.json into
// config.out_dir.
void run_experiment(const ExperimentConfig& config);

// Rebuilds the aggregate files of a finished experiment directory from its
// per-trial data, verifies they match what the run wrote, and renders SVG
// figures. A mismatch raises IoError.
void emit_report(const std::string& dir);

}  // namespace opinet
