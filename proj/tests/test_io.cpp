#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "opinet/common.hpp"
#include "opinet/graph.hpp"
#include "opinet/io.hpp"
#include "opinet/metrics.hpp"
#include "opinet/rng.hpp"

#include "helpers.hpp"

using namespace opinet;
using opinet_test::TempDir;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("ab") != fnv1a64("ba"));
}

TEST_CASE("config_hash is order independent and content sensitive") {
  const nlohmann::json a = {{"x", 1}, {"y", 2.5}};
  const nlohmann::json b = nlohmann::json::parse(R"({"y": 2.5, "x": 1})");
  CHECK(config_hash(a) == config_hash(b));  // object keys are sorted
  const nlohmann::json c = {{"x", 1}, {"y", 2.5000001}};
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("format_double round-trips exactly") {
  for (const double v : {0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, -0.0,
                         0.46776613938643678, 1.7976931348623157e308}) {
    const std::string s = format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(back == v);
  }
  CHECK(format_double(-0.0) == "-0");
}

TEST_CASE("numeric loaders reject non-finite values") {
  TempDir dir;
  opinet_test::write_file(dir.file("nan.csv"), "node,m_ext\n0,nan\n");
  CHECK_THROWS_AS(load_stimulus(dir.file("nan.csv")), IoError);
  opinet_test::write_file(dir.file("inf.csv"), "node,m_ext\n0,inf\n");
  CHECK_THROWS_AS(load_stimulus(dir.file("inf.csv")), IoError);
}

TEST_CASE("edge list files round-trip and carry provenance") {
  TempDir dir;
  const SocialGraph g = generate_watts_strogatz(12, 2, 0.3, 7);
  const Provenance prov{0x1234abcdu, 42};
  const std::string path = dir.file("g.edges");
  save_edge_list(path, g, prov);

  const std::string text = slurp(path);
  CHECK(text.find("# config_hash=") == 0);
  CHECK(text.find("# seed=42") != std::string::npos);
  CHECK(text.find("# version=") != std::string::npos);
  CHECK(text.find("# n=12") != std::string::npos);

  std::ifstream in(path);
  const LoadedGraph loaded = load_edge_list(in);
  CHECK(loaded.graph.node_count() == g.node_count());
  CHECK(loaded.graph.edges() == g.edges());
}

TEST_CASE("couplings round-trip bitwise and check their graph") {
  TempDir dir;
  const SocialGraph g = generate_watts_strogatz(10, 2, 0.5, 9);
  const Couplings j = sample_couplings(g, 0.36, 10);
  const std::string path = dir.file("j.csv");
  save_couplings(path, g, j, {});
  const Couplings back = load_couplings(path, g);
  REQUIRE(back.size() == j.size());
  for (std::size_t e = 0; e < j.size(); ++e) {
    CHECK(back[e] == j[e]);
  }
  // A graph with different edges must be rejected.
  const SocialGraph other = generate_watts_strogatz(10, 2, 0.9, 11);
  if (other.edges() != g.edges()) {
    CHECK_THROWS_AS(load_couplings(path, other), IoError);
  }
}

TEST_CASE("control params round-trip bitwise") {
  TempDir dir;
  const SocialGraph g = generate_watts_strogatz(9, 2, 0.4, 12);
  ControlParams params;
  Rng rng(13);
  params.alpha.resize(g.edge_count());
  params.kappa.resize(g.node_count());
  for (auto& a : params.alpha) {
    a = rng.uniform01() * 3.0;
  }
  for (auto& k : params.kappa) {
    k = rng.uniform01() * 3.0;
  }
  const std::string path = dir.file("params.csv");
  save_control_params(path, g, params, {});
  const ControlParams back = load_control_params(path, g);
  CHECK(back.alpha == params.alpha);
  CHECK(back.kappa == params.kappa);
}

TEST_CASE("stimulus and marginals round-trip with validation") {
  TempDir dir;
  const std::vector<double> m = {0.25, -0.5, 0.0, 1e-12};
  save_stimulus(dir.file("m.csv"), m, {});
  CHECK(load_stimulus(dir.file("m.csv")) == m);

  const std::vector<double> p = {0.0, 0.5, 1.0, 0.46776613938643678};
  save_marginals(dir.file("p.csv"), p, {});
  CHECK(load_marginals(dir.file("p.csv")) == p);

  opinet_test::write_file(dir.file("bad.csv"),
                          "node,p_yes\n0,1.5\n");
  CHECK_THROWS_AS(load_marginals(dir.file("bad.csv")), IoError);
}

TEST_CASE("histograms demand contiguous ascending bins") {
  TempDir dir;
  BeliefHistogram h;
  h.edges = {-1.0, 0.0, 2.0};
  h.counts = {3, 4};
  save_histogram(dir.file("h.csv"), h, {});
  const BeliefHistogram back = load_histogram(dir.file("h.csv"));
  CHECK(back.edges == h.edges);
  CHECK(back.counts == h.counts);

  opinet_test::write_file(dir.file("gap.csv"),
                          "bin_lo,bin_hi,count\n0,1,2\n1.5,2,3\n");
  CHECK_THROWS_AS(load_histogram(dir.file("gap.csv")), IoError);
  opinet_test::write_file(dir.file("flip.csv"),
                          "bin_lo,bin_hi,count\n1,0,2\n");
  CHECK_THROWS_AS(load_histogram(dir.file("flip.csv")), IoError);
}

TEST_CASE("trial summaries round-trip") {
  TempDir dir;
  std::vector<TrialSummary> rows(3);
  rows[0] = {0, 1.5, 0.25, 87.5, 0.125, -0.3};
  rows[1] = {1, 0.0, 0.0, 0.0, 0.0, 0.0};
  rows[2] = {7, 2.25e-3, 1.0 / 3.0, 100.0, 1.0, 12.0};
  save_trial_summaries(dir.file("t.csv"), rows, {});
  const auto back = load_trial_summaries(dir.file("t.csv"));
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].trial == rows[i].trial);
    CHECK(back[i].r == rows[i].r);
    CHECK(back[i].p == rows[i].p);
    CHECK(back[i].pct_correct == rows[i].pct_correct);
    CHECK(back[i].frac_overconfident == rows[i].frac_overconfident);
    CHECK(back[i].b_univ == rows[i].b_univ);
  }
}

TEST_CASE("generic csv helpers round-trip numbers and strings") {
  TempDir dir;
  const std::vector<std::vector<double>> rows = {{1.0, -0.0, 0.1},
                                                 {2.0, 1e-300, -5.5}};
  save_csv(dir.file("n.csv"), "a,b,c", rows, {});
  CHECK(load_csv(dir.file("n.csv"), "a,b,c") == rows);
  CHECK_THROWS_AS(load_csv(dir.file("n.csv"), "a,b"), IoError);

  const std::vector<std::vector<std::string>> raw = {{"bp", "1.25"},
                                                     {"cbp", "-3"}};
  save_raw_csv(dir.file("r.csv"), "mode,value", raw, {});
  CHECK(load_raw_csv(dir.file("r.csv"), "mode,value") == raw);
}

TEST_CASE("io errors carry the offending path and line") {
  TempDir dir;
  CHECK_THROWS_AS(load_stimulus(dir.file("absent.csv")), IoError);

  opinet_test::write_file(dir.file("garbled.csv"),
                          "node,m_ext\n0,0.5\nnonsense\n");
  try {
    load_stimulus(dir.file("garbled.csv"));
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string what = e.what();
    CHECK(what.find("garbled.csv") != std::string::npos);
    CHECK(what.find(":3") != std::string::npos);
  }

  opinet_test::write_file(dir.file("head.csv"), "i,j\n0,0.5\n");
  CHECK_THROWS_AS(load_stimulus(dir.file("head.csv")), IoError);
}

TEST_CASE("provenance json carries config, seed, version and timestamp") {
  TempDir dir;
  const nlohmann::json config = {{"experiment", "battery"}, {"n", 10}};
  write_provenance_json(dir.file("provenance.json"), config, 99);
  const nlohmann::json back = read_json_file(dir.file("provenance.json"));
  CHECK(back["config"]["n"] == 10);
  CHECK(back["seed"] == 99);
  CHECK(back["version"] == kVersion);
  CHECK(back["config_hash"].is_string());
  const std::string stamp = back["generated_at"].get<std::string>();
  CHECK(stamp.size() == 20);  // ISO-8601 UTC, e.g. 2026-01-01T00:00:00Z
  CHECK(stamp.back() == 'Z');
}

TEST_CASE("comment lines are skipped everywhere") {
  TempDir dir;
  opinet_test::write_file(dir.file("c.csv"),
                          "# config_hash=00000000deadbeef\n# seed=5\n"
                          "# version=9.9.9\nnode,m_ext\n# midway note\n"
                          "0,0.125\n1,-2\n");
  const std::vector<double> m = load_stimulus(dir.file("c.csv"));
  REQUIRE(m.size() == 2);
  CHECK(m[0] == 0.125);
  CHECK(m[1] == -2.0);
}

}  // TEST_SUITE
