#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <doctest.h>

#include "opinet/common.hpp"
#include "opinet/engine.hpp"
#include "opinet/graph.hpp"
#include "opinet/learning.hpp"
#include "opinet/oracle.hpp"
#include "opinet/rng.hpp"
#include "opinet/stimuli.hpp"

#include "helpers.hpp"

using namespace opinet;

namespace {

std::vector<TrainingTrial> oracle_trials(const SocialGraph& graph,
                                         const Couplings& couplings,
                                         std::uint32_t count, double sigma,
                                         std::uint64_t seed) {
  std::vector<TrainingTrial> trials(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    ExternalField field =
        uninformative_field(graph.node_count(), sigma, mix_seed(seed, t));
    trials[t].target_p = exact_marginals(graph, couplings, field.m_ext);
    trials[t].external = std::move(field.m_ext);
  }
  return trials;
}

}  // namespace

TEST_SUITE("learning") {

TEST_CASE("analytic gradient matches central differences") {
  // A triangle forces loop traffic through every term of the backward pass.
  const SocialGraph g = SocialGraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  const Couplings j = {0.5, 0.35, 0.6};
  ControlParams params;
  params.alpha = {0.7, 1.2, 0.9};
  params.kappa = {0.8, 1.1, 1.0};
  ScheduleConfig schedule;
  schedule.tau = 0.2;
  schedule.iterations = 5;

  std::vector<TrainingTrial> trials(2);
  trials[0].external = {0.4, -0.3, 0.1};
  trials[0].target_p = {0.6, 0.4, 0.5};
  trials[1].external = {-0.2, 0.5, -0.6};
  trials[1].target_p = {0.45, 0.7, 0.3};

  std::vector<double> ga, gk, fa, fk;
  supervised_gradient(g, j, params, trials, schedule, ga, gk);
  supervised_gradient_fd(g, j, params, trials, schedule, 1e-4, fa, fk);
  REQUIRE(ga.size() == 3);
  REQUIRE(gk.size() == 3);
  for (std::uint32_t e = 0; e < 3; ++e) {
    CHECK(ga[e] == doctest::Approx(fa[e]).epsilon(1e-5));
  }
  for (std::uint32_t i = 0; i < 3; ++i) {
    CHECK(gk[i] == doctest::Approx(fk[i]).epsilon(1e-5));
  }
  // The model is off target, so the gradient cannot vanish.
  double norm = 0.0;
  for (const double v : ga) {
    norm += std::fabs(v);
  }
  for (const double v : gk) {
    norm += std::fabs(v);
  }
  CHECK(norm > 1e-6);
}

TEST_CASE("gradients also agree on a longer damped unroll") {
  const SocialGraph g = generate_watts_strogatz(8, 2, 0.3, 71);
  const Couplings j = sample_couplings(g, 0.6, 72);
  ControlParams params = ControlParams::bp_defaults(g.edge_count(), 8);
  Rng rng(73);
  for (auto& a : params.alpha) {
    a = 0.6 + 0.8 * rng.uniform01();
  }
  for (auto& k : params.kappa) {
    k = 0.6 + 0.8 * rng.uniform01();
  }
  ScheduleConfig schedule;
  schedule.iterations = 30;
  const auto trials = oracle_trials(g, j, 3, 1.0, 74);
  std::vector<double> ga, gk, fa, fk;
  supervised_gradient(g, j, params, trials, schedule, ga, gk);
  supervised_gradient_fd(g, j, params, trials, schedule, 1e-4, fa, fk);
  for (std::size_t e = 0; e < ga.size(); ++e) {
    CHECK(ga[e] ==
          doctest::Approx(fa[e]).epsilon(1e-4).scale(std::fabs(fa[e]) + 1.0));
  }
  for (std::size_t i = 0; i < gk.size(); ++i) {
    CHECK(gk[i] ==
          doctest::Approx(fk[i]).epsilon(1e-4).scale(std::fabs(fk[i]) + 1.0));
  }
}

TEST_CASE("two node supervised training reaches near-zero loss") {
  const SocialGraph g = SocialGraph::from_edges(2, {{0, 1}});
  const Couplings j = {0.5};
  const auto trials = oracle_trials(g, j, 20, 1.0, 5);
  SupervisedConfig config;
  config.steps = 40;
  config.batch_size = 5;
  config.eval_every = 10;
  const SupervisedResult result = train_supervised(g, j, trials, config);
  CHECK(result.best_loss < 1e-6);
  CHECK(result.best_loss <= result.initial_loss);
  CHECK(result.steps_run == 40);
  CHECK(result.loss_history.size() >= 2);
}

TEST_CASE("training never ends worse than the unit start") {
  const SocialGraph g = generate_watts_strogatz(8, 2, 0.4, 81);
  const Couplings j = sample_couplings(g, 0.6, 82);
  const auto trials = oracle_trials(g, j, 12, 1.0, 83);
  SupervisedConfig config;
  config.steps = 25;
  config.batch_size = 4;
  config.eval_every = 5;
  config.learning_rate = 0.2;  // deliberately coarse
  const SupervisedResult result = train_supervised(g, j, trials, config);
  CHECK(result.best_loss <= result.initial_loss);
  ScheduleConfig schedule;
  const double replay = supervised_loss(g, j, result.params, trials, schedule);
  CHECK(replay == doctest::Approx(result.best_loss).epsilon(1e-12));
}

TEST_CASE("parameters stay inside the projection box") {
  const SocialGraph g = SocialGraph::from_edges(3, {{0, 1}, {1, 2}});
  const Couplings j = {0.5, 0.5};
  const auto trials = oracle_trials(g, j, 6, 1.0, 9);
  SupervisedConfig config;
  config.steps = 30;
  config.batch_size = 3;
  config.eval_every = 10;
  config.learning_rate = 5.0;  // drives parameters into the walls
  const SupervisedResult result = train_supervised(g, j, trials, config);
  for (const double a : result.params.alpha) {
    CHECK(a >= 0.0);
    CHECK(a <= 10.0);
  }
  for (const double k : result.params.kappa) {
    CHECK(k >= 0.0);
    CHECK(k <= 10.0);
  }
}

TEST_CASE("supervised config validation") {
  const SocialGraph g = SocialGraph::from_edges(2, {{0, 1}});
  const Couplings j = {0.5};
  const auto trials = oracle_trials(g, j, 4, 1.0, 11);

  SupervisedConfig config;
  config.schedule.early_stop_eps = 1e-6;  // unrolls must have fixed length
  CHECK_THROWS_AS(train_supervised(g, j, trials, config), ConfigError);

  config = SupervisedConfig{};
  config.batch_size = 0;
  CHECK_THROWS_AS(train_supervised(g, j, trials, config), ConfigError);

  config = SupervisedConfig{};
  config.param_lo = 2.0;  // box must contain the unit start
  CHECK_THROWS_AS(train_supervised(g, j, trials, config), ConfigError);

  config = SupervisedConfig{};
  config.param_hi = 0.5;
  CHECK_THROWS_AS(train_supervised(g, j, trials, config), ConfigError);

  config = SupervisedConfig{};
  CHECK_THROWS_AS(train_supervised(g, j, {}, config), ConfigError);

  std::vector<TrainingTrial> bad = trials;
  bad[0].target_p = {0.5};
  CHECK_THROWS_AS(train_supervised(g, j, bad, config), ConfigError);
}

TEST_CASE("local rule increments") {
  // With alpha = 1 a message of 0.2 against a belief of 0.5 drives the
  // correction up by 0.2 * (0.5 - 0.2) = 0.06 per unit learning rate.
  CHECK(alpha_increment(0.2, 0.5, 1.0) == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(alpha_increment(0.0, 0.5, 1.0) == 0.0);
  CHECK(kappa_increment(0.5, 0.3, 0.4) ==
        doctest::Approx(-(0.25 - 0.3 - 0.16)).epsilon(1e-12));
}

TEST_CASE("unsupervised training on a tree settles at unit parameters") {
  const SocialGraph tree = opinet_test::random_tree(6, 91);
  const Couplings j = sample_couplings(tree, 0.6, 92);
  std::vector<std::vector<double>> externals;
  for (std::uint32_t t = 0; t < 1500; ++t) {
    externals.push_back(uninformative_field(6, 1.0, mix_seed(93, t)).m_ext);
  }
  UnsupervisedConfig config;
  const UnsupervisedResult result =
      train_unsupervised(tree, j, externals, config);
  for (const double a : result.params.alpha) {
    CHECK(std::fabs(a - 1.0) < 0.05);
  }
  for (const double k : result.params.kappa) {
    CHECK(std::fabs(k - 1.0) < 0.05);
  }
  CHECK(result.trials_run == 1500);
  CHECK(result.alpha_settled);
  CHECK(result.kappa_settled);
}

TEST_CASE("excessive rates abort with a numeric error") {
  const SocialGraph g = generate_watts_strogatz(10, 2, 0.2, 95);
  const Couplings j = sample_couplings(g, 0.6, 96);
  std::vector<std::vector<double>> externals;
  for (std::uint32_t t = 0; t < 10; ++t) {
    externals.push_back(uninformative_field(10, 1.0, mix_seed(97, t)).m_ext);
  }
  UnsupervisedConfig config;
  config.rate_alpha = 1e8;
  config.rate_kappa = 1e8;
  try {
    train_unsupervised(g, j, externals, config);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("smaller learning rates") !=
          std::string::npos);
  }
}

TEST_CASE("unsupervised parameters never go negative") {
  const SocialGraph g = generate_watts_strogatz(8, 2, 0.3, 98);
  const Couplings j = sample_couplings(g, 0.6, 99);
  std::vector<std::vector<double>> externals;
  for (std::uint32_t t = 0; t < 200; ++t) {
    externals.push_back(uninformative_field(8, 1.0, mix_seed(100, t)).m_ext);
  }
  UnsupervisedConfig config;
  config.rate_alpha = 0.05;  // coarse enough to hit the zero clamp
  config.rate_kappa = 0.05;
  const UnsupervisedResult result =
      train_unsupervised(g, j, externals, config);
  for (const double a : result.params.alpha) {
    CHECK(a >= 0.0);
  }
  for (const double k : result.params.kappa) {
    CHECK(k >= 0.0);
  }
}

}  // TEST_SUITE
