#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "opinet/common.hpp"
#include "opinet/engine.hpp"
#include "opinet/experiments.hpp"
#include "opinet/graph.hpp"
#include "opinet/io.hpp"
#include "opinet/stimuli.hpp"

#include "helpers.hpp"

using namespace opinet;
using opinet_test::TempDir;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig desk_battery(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.experiment = "battery";
  cfg.out_dir = out_dir;
  cfg.seed = 3;
  cfg.n = 10;
  cfg.k = 2;
  cfg.beta = 0.2;
  cfg.j_max = 0.6;
  cfg.sigma_ext = 1.0;
  cfg.iterations = 50;
  cfg.n_graphs = 2;
  cfg.n_trials = 5;
  cfg.hist_bins = 11;
  cfg.training = "none";
  return cfg;
}

// Relative paths of regular files under dir, sorted.
std::vector<std::string> dir_listing(const std::string& dir) {
  std::vector<std::string> names;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      names.push_back(
          std::filesystem::relative(entry.path(), dir).generic_string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("every preset parses and validates") {
  const std::vector<std::string> names = preset_names();
  CHECK(names.size() == 9);
  for (const std::string& name : names) {
    CAPTURE(name);
    nlohmann::json flat = preset_config(name);
    flat["out_dir"] = "out";
    const ExperimentConfig cfg = ExperimentConfig::from_json(flat);
    CHECK_NOTHROW(cfg.validate());
  }
  CHECK_THROWS_AS(preset_config("fig99"), ConfigError);
}

TEST_CASE("config parsing rejects unknown keys and wrong types") {
  nlohmann::json flat = preset_config("fig2");
  flat["out_dir"] = "out";
  flat["grpah_file"] = "typo.edges";
  try {
    ExperimentConfig::from_json(flat);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("grpah_file") != std::string::npos);
  }

  nlohmann::json bad_type = preset_config("fig2");
  bad_type["out_dir"] = "out";
  bad_type["n"] = "ten";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_type), ConfigError);
}

TEST_CASE("validate rejects inconsistent configurations") {
  ExperimentConfig cfg = desk_battery("out");
  CHECK_NOTHROW(cfg.validate());

  ExperimentConfig bad = cfg;
  bad.experiment = "mystery";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.out_dir.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.hist_bins = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.training = "sometimes";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.graph_file = "g.edges";  // a fixed graph admits only one replicate
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.experiment = "sweep";
  bad.training = "unsupervised";
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // empty k grid

  bad = cfg;
  bad.experiment = "dose";
  bad.training = "unsupervised";
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // empty dose grid

  bad = cfg;
  bad.experiment = "dose";
  bad.training = "unsupervised";
  bad.informed_pct = {5.0, 101.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.hist_degree_lo = 5;
  bad.hist_degree_hi = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config json round-trips") {
  ExperimentConfig cfg = desk_battery("somewhere");
  cfg.k_values = {4, 8};
  cfg.beta_values = {0.1};
  cfg.informed_pct = {1.0, 20.0};
  const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
}

TEST_CASE("bfs subgraph keeps reachable nodes in old-id order") {
  const SocialGraph path =
      SocialGraph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const SocialGraph head = induced_subgraph_bfs(path, 0, 3);
  CHECK(head.node_count() == 3);
  REQUIRE(head.edge_count() == 2);
  CHECK(head.edges()[0] == Edge{0, 1});
  CHECK(head.edges()[1] == Edge{1, 2});

  const SocialGraph star =
      SocialGraph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const SocialGraph hub = induced_subgraph_bfs(star, 0, 3);
  CHECK(hub.node_count() == 3);
  REQUIRE(hub.edge_count() == 2);
  CHECK(hub.edges()[0] == Edge{0, 1});
  CHECK(hub.edges()[1] == Edge{0, 2});

  // A second component stays invisible to the search.
  const SocialGraph split = SocialGraph::from_edges(4, {{0, 1}, {2, 3}});
  const SocialGraph far_side = induced_subgraph_bfs(split, 2, 10);
  CHECK(far_side.node_count() == 2);
  REQUIRE(far_side.edge_count() == 1);
  CHECK(far_side.edges()[0] == Edge{0, 1});

  CHECK_THROWS_AS(induced_subgraph_bfs(split, 4, 2), ConfigError);
  CHECK_THROWS_AS(induced_subgraph_bfs(split, 0, 0), ConfigError);
}

TEST_CASE("battery trials stay paired across modes") {
  const SocialGraph g = generate_watts_strogatz(10, 2, 0.2, 21);
  const Couplings j = sample_couplings(g, 0.6, 22);
  const ControlParams params =
      ControlParams::bp_defaults(g.edge_count(), g.node_count());
  ScheduleConfig schedule;
  schedule.iterations = 40;
  StimulusSpec spec;
  spec.kind = StimulusKind::Uninformative;
  spec.sigma_ext = 1.0;

  const BatteryOutput bp = run_battery(g, j, params, InferenceMode::BP,
                                       schedule, spec, 6, 5, 2, 12);
  const BatteryOutput mf = run_battery(g, j, params, InferenceMode::MeanField,
                                       schedule, spec, 6, 5, 2, 12);
  REQUIRE(bp.trials.size() == 6);
  REQUIRE(bp.beliefs.size() == 6);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(bp.trials[t].trial == 12 + t);
    // Identical stimuli on both runs, so the observer column matches.
    CHECK(bp.trials[t].b_univ == mf.trials[t].b_univ);
    CHECK(bp.beliefs[t].size() == 10);
  }

  // A different trial offset draws a different stimulus stream.
  const BatteryOutput shifted = run_battery(g, j, params, InferenceMode::BP,
                                            schedule, spec, 6, 5, 2, 13);
  CHECK(shifted.trials[0].b_univ == bp.trials[1].b_univ);
  CHECK(shifted.trials[5].b_univ != bp.trials[5].b_univ);
}

TEST_CASE("battery outputs are byte-stable across worker counts") {
  TempDir dir;
  ExperimentConfig one = desk_battery(dir.file("w1"));
  one.workers = 1;
  ExperimentConfig two = desk_battery(dir.file("w2"));
  two.workers = 2;

  run_experiment(one);
  run_experiment(two);

  const auto names_one = dir_listing(one.out_dir);
  const auto names_two = dir_listing(two.out_dir);
  REQUIRE(names_one == names_two);
  REQUIRE(!names_one.empty());

  // Ten nodes sit inside the oracle budget, so scatter data must exist.
  const std::set<std::string> set_one(names_one.begin(), names_one.end());
  CHECK(set_one.count("scatter_bp.csv") == 1);
  CHECK(set_one.count("rmse_bp.csv") == 1);
  CHECK(set_one.count("summary.csv") == 1);

  for (const std::string& name : names_one) {
    if (name == "provenance.json") {
      continue;  // carries a timestamp and the worker count
    }
    CAPTURE(name);
    CHECK(slurp(std::filesystem::path(one.out_dir) / name) ==
          slurp(std::filesystem::path(two.out_dir) / name));
  }
}

TEST_CASE("report verifies aggregates and renders figures") {
  TempDir dir;
  ExperimentConfig cfg = desk_battery(dir.file("run"));
  run_experiment(cfg);

  emit_report(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);
  CHECK(std::filesystem::exists(out / "report_hist_bp.svg"));
  CHECK(std::filesystem::exists(out / "report_scatter.svg"));

  // A doctored aggregate row must be caught by the recomputation.
  opinet_test::write_file(
      (out / "summary.csv").string(),
      "mode,mean_R,mean_P,mean_pct_correct,median_frac_overconfident,"
      "mode_count\nbp,0,0,0,0,1\n");
  try {
    emit_report(cfg.out_dir);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("does not match recomputation") !=
          std::string::npos);
  }
}

TEST_CASE("dose experiment writes paired curves") {
  TempDir dir;
  ExperimentConfig cfg;
  cfg.experiment = "dose";
  cfg.out_dir = dir.file("dose");
  cfg.seed = 11;
  cfg.n = 10;
  cfg.k = 2;
  cfg.beta = 0.2;
  cfg.j_max = 0.6;
  cfg.sigma_ext = 1.0;
  cfg.iterations = 30;
  cfg.n_graphs = 1;
  cfg.n_trials = 4;
  cfg.hist_bins = 5;
  cfg.training = "unsupervised";
  cfg.unsup_trials = 20;
  cfg.informed_pct = {10.0, 50.0};
  run_experiment(cfg);

  const auto rows = load_raw_csv(
      (std::filesystem::path(cfg.out_dir) / "dose_curves.csv").string(),
      "informed_pct,mode,mean_pct_correct");
  REQUIRE(rows.size() == 2 * 4);  // bp, cbp, universal, external per dose
  for (const auto& row : rows) {
    const double value = std::stod(row[2]);
    CHECK(value >= 0.0);
    CHECK(value <= 100.0);
  }

  emit_report(cfg.out_dir);
  CHECK(std::filesystem::exists(
      std::filesystem::path(cfg.out_dir) / "report_dose.svg"));
}

TEST_CASE("degree experiment ranks nodes of a loaded graph") {
  TempDir dir;
  const SocialGraph g = opinet_test::heavy_tail_graph(30, 2, 17);
  const std::string graph_path = dir.file("heavy.edges");
  save_edge_list(graph_path, g, {});

  ExperimentConfig cfg;
  cfg.experiment = "degree";
  cfg.out_dir = dir.file("deg");
  cfg.seed = 13;
  cfg.graph_file = graph_path;
  cfg.j_max = 0.3;
  cfg.sigma_ext = 1.0;
  cfg.iterations = 30;
  cfg.n_graphs = 1;
  cfg.n_trials = 5;
  cfg.training = "unsupervised";
  cfg.unsup_trials = 20;
  run_experiment(cfg);

  const std::filesystem::path out(cfg.out_dir);
  const auto nodes = load_csv(
      (out / "degree_nodes.csv").string(),
      "node,degree,mean_abs_b_bp,mean_abs_b_cbp,kappa,mean_alpha");
  CHECK(nodes.size() == 30);
  const auto summary = load_raw_csv((out / "degree_summary.csv").string(),
                                    "metric,spearman");
  CHECK(summary.size() == 4);

  emit_report(cfg.out_dir);
  CHECK(std::filesystem::exists(out / "report_degree_beliefs.svg"));
  CHECK(std::filesystem::exists(out / "report_degree_kappa.svg"));
  CHECK(std::filesystem::exists(out / "report_degree_alpha.svg"));
}

TEST_CASE("missing facebook data resolves to a clear error") {
  ::unsetenv("OPINET_FACEBOOK_EDGELIST");
  TempDir dir;
  ExperimentConfig cfg;
  cfg.experiment = "degree";
  cfg.out_dir = dir.file("unused");
  cfg.graph_file = "auto:facebook";
  cfg.n_graphs = 1;
  cfg.training = "unsupervised";
  try {
    run_experiment(cfg);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("OPINET_FACEBOOK_EDGELIST") !=
          std::string::npos);
  }
}

}  // TEST_SUITE
