#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opinet/common.hpp"
#include "opinet/engine.hpp"
#include "opinet/experiments.hpp"
#include "opinet/graph.hpp"
#include "opinet/io.hpp"
#include "opinet/learning.hpp"
#include "opinet/metrics.hpp"
#include "opinet/oracle.hpp"
#include "opinet/rng.hpp"
#include "opinet/stimuli.hpp"

namespace {

using namespace opinet;

SocialGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  try {
    return load_edge_list(in).graph;
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

InferenceMode parse_mode(const std::string& name) {
  if (name == "bp") {
    return InferenceMode::BP;
  }
  if (name == "cbp") {
    return InferenceMode::CBP;
  }
  if (name == "mf" || name == "mean_field") {
    return InferenceMode::MeanField;
  }
  throw ConfigError("unknown mode '" + name + "' (expected bp, cbp or mf)");
}

struct GenGraphArgs {
  std::uint32_t n = 10;
  std::uint32_t k = 4;
  double beta = 0.1;
  std::uint64_t seed = 1;
  std::string out;
  double j_max = 0.0;
  std::string couplings_out;
  std::uint32_t stats_samples = 200;
};

int cmd_gen_graph(const GenGraphArgs& a) {
  const SocialGraph graph = generate_watts_strogatz(a.n, a.k, a.beta, a.seed);
  nlohmann::json cmd{{"command", "gen-graph"}, {"n", a.n},        {"k", a.k},
                     {"beta", a.beta},         {"seed", a.seed},  {"out", a.out},
                     {"j_max", a.j_max},       {"couplings_out", a.couplings_out}};
  const Provenance prov{config_hash(cmd), a.seed};
  save_edge_list(a.out, graph, prov);
  if (!a.couplings_out.empty()) {
    if (a.j_max <= 0.0) {
      throw ConfigError("--couplings-out needs --j-max > 0");
    }
    const Couplings couplings = sample_couplings(
        graph, a.j_max, mix_seed(a.seed, kSeedTagCouplings, 0));
    save_couplings(a.couplings_out, graph, couplings, prov);
  }
  const GraphStats stats =
      compute_stats(graph, a.stats_samples, mix_seed(a.seed, 0x5741u));
  nlohmann::json report{
      {"nodes", graph.node_count()},
      {"edges", graph.edge_count()},
      {"mean_degree", stats.mean_degree},
      {"clustering_coefficient", stats.clustering_coefficient},
      {"mean_path_length", stats.mean_path_length},
      {"largest_component_size", stats.largest_component_size}};
  std::cout << report.dump(2) << std::endl;
  return 0;
}

struct StimuliArgs {
  std::uint32_t n = 0;
  std::string kind = "uninformative";
  double sigma = 1.0;
  bool sigma_set = false;
  std::uint32_t informed = 0;
  double bias = 0.05;
  int truth = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_stimuli(const StimuliArgs& a) {
  StimulusSpec spec;
  if (a.kind == "uninformative") {
    spec.kind = StimulusKind::Uninformative;
    spec.sigma_ext = a.sigma_set ? a.sigma : 1.0;
  } else if (a.kind == "informative") {
    if (a.truth != 1 && a.truth != -1) {
      throw ConfigError("--truth must be 1 or -1");
    }
    spec.kind = StimulusKind::Informative;
    spec.sigma_ext = a.sigma_set ? a.sigma : 0.05;
    spec.bias = a.truth * a.bias;
    spec.informed_count = a.informed;
  } else {
    throw ConfigError("unknown stimulus kind '" + a.kind + "'");
  }
  spec.validate(a.n);
  const ExternalField field = generate_field(a.n, spec, a.seed);
  nlohmann::json cmd{{"command", "stimuli"},   {"n", a.n},
                     {"kind", a.kind},         {"sigma", spec.sigma_ext},
                     {"informed", a.informed}, {"bias", spec.bias},
                     {"seed", a.seed}};
  save_stimulus(a.out, field.m_ext, Provenance{config_hash(cmd), a.seed});
  std::cout << "universal_observer " << format_double(
      universal_observer(field.m_ext)) << std::endl;
  return 0;
}

struct OracleArgs {
  std::string graph;
  std::string couplings;
  std::string stimulus;
  std::string out;
};

int cmd_oracle(const OracleArgs& a) {
  const SocialGraph graph = load_graph_file(a.graph);
  const Couplings couplings = load_couplings(a.couplings, graph);
  const std::vector<double> m_ext = load_stimulus(a.stimulus);
  if (m_ext.size() != graph.node_count()) {
    throw ConfigError("stimulus has " + std::to_string(m_ext.size()) +
                      " nodes but the graph has " +
                      std::to_string(graph.node_count()));
  }
  const std::vector<double> p_yes = exact_marginals(graph, couplings, m_ext);
  nlohmann::json cmd{{"command", "oracle"},
                     {"graph", a.graph},
                     {"couplings", a.couplings},
                     {"stimulus", a.stimulus}};
  save_marginals(a.out, p_yes, Provenance{config_hash(cmd), 0});
  std::cout << "wrote " << a.out << std::endl;
  return 0;
}

struct RunArgs {
  std::string mode = "bp";
  std::string graph;
  std::string couplings;
  std::string stimulus;
  std::string params;
  std::string out;
  std::string trajectory;
  ScheduleConfig schedule;
};

int cmd_run(const RunArgs& a) {
  const InferenceMode mode = parse_mode(a.mode);
  const SocialGraph graph = load_graph_file(a.graph);
  const Couplings couplings = load_couplings(a.couplings, graph);
  const std::vector<double> m_ext = load_stimulus(a.stimulus);
  if (m_ext.size() != graph.node_count()) {
    throw ConfigError("stimulus has " + std::to_string(m_ext.size()) +
                      " nodes but the graph has " +
                      std::to_string(graph.node_count()));
  }
  ControlParams params =
      ControlParams::bp_defaults(graph.edge_count(), graph.node_count());
  if (!a.params.empty()) {
    params = load_control_params(a.params, graph);
  }
  ScheduleConfig schedule = a.schedule;
  schedule.record_trajectory = !a.trajectory.empty();
  const PropagationState state =
      run(graph, couplings, m_ext, params, schedule, mode);
  nlohmann::json cmd{{"command", "run"},         {"mode", a.mode},
                     {"graph", a.graph},         {"couplings", a.couplings},
                     {"stimulus", a.stimulus},   {"params", a.params},
                     {"tau", schedule.tau},      {"iterations", schedule.iterations},
                     {"eps", schedule.early_stop_eps}};
  const Provenance prov{config_hash(cmd), 0};
  save_beliefs(a.out, state.beliefs, prov);
  if (!a.trajectory.empty()) {
    save_trajectory(a.trajectory, state.trajectory, prov);
  }
  std::cout << "iterations " << state.iterations_run << " max_delta "
            << format_double(state.last_max_delta) << " converged "
            << (state.converged ? "yes" : "no") << std::endl;
  return 0;
}

struct TrainArgs {
  std::string method = "unsupervised";
  std::string graph;
  std::string couplings;
  std::string out;
  std::string loss_out;
  std::uint32_t trials = 2000;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  std::uint32_t steps = 400;
  std::uint32_t batch = 10;
  double rate = 0.05;
  std::uint32_t eval_every = 20;
  double rate_alpha = 1e-2;
  double rate_kappa = 1e-3;
  ScheduleConfig schedule;
};

int cmd_train(const TrainArgs& a) {
  const SocialGraph graph = load_graph_file(a.graph);
  const Couplings couplings = load_couplings(a.couplings, graph);
  nlohmann::json cmd{{"command", "train"},   {"method", a.method},
                     {"graph", a.graph},     {"couplings", a.couplings},
                     {"trials", a.trials},   {"sigma", a.sigma},
                     {"seed", a.seed}};
  const Provenance prov{config_hash(cmd), a.seed};

  if (a.method == "supervised") {
    if (graph.node_count() > kOracleMaxNodes) {
      throw ConfigError("supervised training needs exact targets, so the "
                        "graph may not exceed " +
                        std::to_string(kOracleMaxNodes) + " nodes");
    }
    std::vector<TrainingTrial> trials(a.trials);
    for (std::uint32_t t = 0; t < a.trials; ++t) {
      ExternalField field =
          uninformative_field(graph.node_count(), a.sigma,
                              mix_seed(a.seed, kSeedTagTraining, t));
      trials[t].target_p = exact_marginals(graph, couplings, field.m_ext);
      trials[t].external = std::move(field.m_ext);
    }
    SupervisedConfig sc;
    sc.steps = a.steps;
    sc.batch_size = a.batch;
    sc.learning_rate = a.rate;
    sc.eval_every = a.eval_every;
    sc.schedule = a.schedule;
    const SupervisedResult result =
        train_supervised(graph, couplings, trials, sc);
    save_control_params(a.out, graph, result.params, prov);
    if (!a.loss_out.empty()) {
      std::vector<std::vector<double>> history;
      for (std::size_t c = 0; c < result.loss_history.size(); ++c) {
        history.push_back({static_cast<double>(c), result.loss_history[c]});
      }
      save_csv(a.loss_out, "checkpoint,loss", history, prov);
    }
    std::cout << "loss " << format_double(result.initial_loss) << " -> "
              << format_double(result.best_loss) << " over "
              << result.steps_run << " steps" << std::endl;
    return 0;
  }
  if (a.method != "unsupervised") {
    throw ConfigError("unknown training method '" + a.method + "'");
  }
  std::vector<std::vector<double>> externals;
  externals.reserve(a.trials);
  for (std::uint32_t t = 0; t < a.trials; ++t) {
    externals.push_back(
        uninformative_field(graph.node_count(), a.sigma,
                            mix_seed(a.seed, kSeedTagTraining, t))
            .m_ext);
  }
  UnsupervisedConfig uc;
  uc.rate_alpha = a.rate_alpha;
  uc.rate_kappa = a.rate_kappa;
  uc.schedule = a.schedule;
  const UnsupervisedResult result =
      train_unsupervised(graph, couplings, externals, uc);
  save_control_params(a.out, graph, result.params, prov);
  std::cout << "trials " << result.trials_run << " alpha_settled "
            << (result.alpha_settled ? "yes" : "no") << " kappa_settled "
            << (result.kappa_settled ? "yes" : "no") << std::endl;
  return 0;
}

struct SweepArgs {
  std::string preset;
  std::string config_file;
  std::string out_dir;
  bool out_dir_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint32_t workers = 0;
  bool workers_set = false;
  std::vector<std::string> overrides;
};

void merge_into(nlohmann::json& base, const nlohmann::json& overlay) {
  for (const auto& [key, value] : overlay.items()) {
    base[key] = value;
  }
}

int cmd_sweep(const SweepArgs& a) {
  nlohmann::json merged = nlohmann::json::object();
  if (!a.preset.empty()) {
    merge_into(merged, preset_config(a.preset));
  }
  if (!a.config_file.empty()) {
    const nlohmann::json file = read_json_file(a.config_file);
    if (!file.is_object()) {
      throw ConfigError(a.config_file + ": config must be a JSON object");
    }
    merge_into(merged, file);
  }
  for (const std::string& kv : a.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const nlohmann::json parsed =
        nlohmann::json::parse(value, nullptr, false);
    merged[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  }
  if (a.out_dir_set) {
    merged["out_dir"] = a.out_dir;
  }
  if (a.seed_set) {
    merged["seed"] = a.seed;
  }
  if (a.workers_set) {
    merged["workers"] = a.workers;
  }
  const ExperimentConfig cfg = ExperimentConfig::from_json(merged);
  run_experiment(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opinion propagation on social graphs: belief propagation "
               "with learned loop corrections"};
  app.require_subcommand(1);

  GenGraphArgs gg;
  CLI::App* gen = app.add_subcommand(
      "gen-graph", "Generate a small-world graph and print its statistics");
  gen->add_option("--n", gg.n, "Number of nodes");
  gen->add_option("--k", gg.k, "Lattice neighbors per side");
  gen->add_option("--beta", gg.beta, "Rewiring probability");
  gen->add_option("--seed", gg.seed, "Random seed");
  gen->add_option("--out", gg.out, "Edge list output path")->required();
  gen->add_option("--j-max", gg.j_max, "Coupling strength upper bound");
  gen->add_option("--couplings-out", gg.couplings_out,
                  "Couplings CSV output path");
  gen->add_option("--stats-samples", gg.stats_samples,
                  "BFS sources for the mean path length estimate");

  StimuliArgs st;
  CLI::App* sti = app.add_subcommand("stimuli",
                                     "Generate an external stimulus CSV");
  sti->add_option("--n", st.n, "Number of nodes")->required();
  sti->add_option("--kind", st.kind, "uninformative or informative");
  CLI::Option* sigma_opt =
      sti->add_option("--sigma", st.sigma, "Stimulus noise scale");
  sti->add_option("--informed", st.informed,
                  "Nodes receiving the stimulus (informative only)");
  sti->add_option("--bias", st.bias, "Stimulus bias magnitude");
  sti->add_option("--truth", st.truth, "Correct choice sign, 1 or -1");
  sti->add_option("--seed", st.seed, "Random seed");
  sti->add_option("--out", st.out, "Stimulus CSV output path")->required();

  OracleArgs oa;
  CLI::App* ora = app.add_subcommand(
      "oracle", "Exact posterior marginals by full enumeration");
  ora->add_option("--graph", oa.graph, "Edge list path")->required();
  ora->add_option("--couplings", oa.couplings, "Couplings CSV")->required();
  ora->add_option("--stimulus", oa.stimulus, "Stimulus CSV")->required();
  ora->add_option("--out", oa.out, "Marginals CSV output path")->required();

  RunArgs ra;
  CLI::App* run = app.add_subcommand("run", "Propagate beliefs on a graph");
  run->add_option("--mode", ra.mode, "bp, cbp or mf");
  run->add_option("--graph", ra.graph, "Edge list path")->required();
  run->add_option("--couplings", ra.couplings, "Couplings CSV")->required();
  run->add_option("--stimulus", ra.stimulus, "Stimulus CSV")->required();
  run->add_option("--params", ra.params,
                  "Control parameters CSV (cbp only; defaults to all ones)");
  run->add_option("--out", ra.out, "Beliefs CSV output path")->required();
  run->add_option("--trajectory", ra.trajectory,
                  "Belief trajectory CSV output path");
  run->add_option("--tau", ra.schedule.tau, "Damping step in (0, 1]");
  run->add_option("--iterations", ra.schedule.iterations, "Sweep count");
  run->add_option("--eps", ra.schedule.early_stop_eps,
                  "Early stop threshold on max |dM|; 0 disables");
  run->add_option("--workers", ra.schedule.workers, "Worker threads");

  TrainArgs ta;
  CLI::App* tra = app.add_subcommand("train",
                                     "Fit loop corrections and gains");
  tra->add_option("--method", ta.method, "supervised or unsupervised");
  tra->add_option("--graph", ta.graph, "Edge list path")->required();
  tra->add_option("--couplings", ta.couplings, "Couplings CSV")->required();
  tra->add_option("--out", ta.out, "Parameters CSV output path")->required();
  tra->add_option("--loss-out", ta.loss_out,
                  "Loss history CSV (supervised only)");
  tra->add_option("--trials", ta.trials, "Training trials");
  tra->add_option("--sigma", ta.sigma, "Stimulus noise scale");
  tra->add_option("--seed", ta.seed, "Random seed");
  tra->add_option("--steps", ta.steps, "Optimizer steps (supervised)");
  tra->add_option("--batch", ta.batch, "Minibatch size (supervised)");
  tra->add_option("--rate", ta.rate, "Learning rate (supervised)");
  tra->add_option("--eval-every", ta.eval_every,
                  "Checkpoint interval in steps (supervised)");
  tra->add_option("--rate-alpha", ta.rate_alpha,
                  "Correction learning rate (unsupervised)");
  tra->add_option("--rate-kappa", ta.rate_kappa,
                  "Gain learning rate (unsupervised)");
  tra->add_option("--tau", ta.schedule.tau, "Damping step in (0, 1]");
  tra->add_option("--iterations", ta.schedule.iterations, "Sweep count");
  tra->add_option("--workers", ta.schedule.workers, "Worker threads");

  SweepArgs sa;
  CLI::App* swe = app.add_subcommand(
      "sweep", "Run a full experiment from a preset or config file");
  swe->add_option("--preset", sa.preset,
                  "Named starting configuration; see --list-presets");
  swe->add_option("--config", sa.config_file, "JSON config file");
  CLI::Option* od = swe->add_option("--out-dir", sa.out_dir,
                                    "Output directory");
  CLI::Option* sd = swe->add_option("--seed", sa.seed, "Random seed");
  CLI::Option* wk = swe->add_option("--workers", sa.workers,
                                    "Worker threads");
  swe->add_option("--set", sa.overrides,
                  "Override a config key, e.g. --set n_trials=50 or "
                  "--set k_values=[10,20]");
  bool list_presets = false;
  swe->add_flag("--list-presets", list_presets, "Print preset names");

  std::string report_dir;
  CLI::App* rep = app.add_subcommand(
      "report", "Validate an experiment directory and render SVG figures");
  rep->add_option("--dir", report_dir, "Experiment output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_graph(gg);
    }
    if (sti->parsed()) {
      st.sigma_set = sigma_opt->count() > 0;
      return cmd_stimuli(st);
    }
    if (ora->parsed()) {
      return cmd_oracle(oa);
    }
    if (run->parsed()) {
      return cmd_run(ra);
    }
    if (tra->parsed()) {
      return cmd_train(ta);
    }
    if (swe->parsed()) {
      if (list_presets) {
        for (const std::string& name : preset_names()) {
          std::cout << name << std::endl;
        }
        return 0;
      }
      sa.out_dir_set = od->count() > 0;
      sa.seed_set = sd->count() > 0;
      sa.workers_set = wk->count() > 0;
      return cmd_sweep(sa);
    }
    if (rep->parsed()) {
      emit_report(report_dir);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
