#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "opinet/common.hpp"
#include "opinet/rng.hpp"
#include "opinet/stimuli.hpp"

using namespace opinet;

TEST_SUITE("stimuli") {

TEST_CASE("uninformative field informs every node with zero-mean noise") {
  const ExternalField field = uninformative_field(100000, 1.0, 31);
  REQUIRE(field.m_ext.size() == 100000);
  REQUIRE(field.informed.size() == 100000);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < field.m_ext.size(); ++i) {
    CHECK(field.informed[i] == 1);
    sum += field.m_ext[i];
    sq += field.m_ext[i] * field.m_ext[i];
  }
  const double mean = sum / 1e5;
  const double var = sq / 1e5 - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("one-sigma tail matches the normal distribution") {
  // Evidence below -sigma argues for the wrong side of a fair question;
  // its frequency must match Phi(-1).
  const ExternalField field = uninformative_field(100000, 2.0, 77);
  std::size_t below = 0;
  for (const double m : field.m_ext) {
    if (m < -2.0) {
      ++below;
    }
  }
  const double frac = static_cast<double>(below) / 1e5;
  const double phi_minus_1 = 0.15865525393145705;
  CHECK(std::fabs(frac - phi_minus_1) < 0.005);
}

TEST_CASE("informative field touches exactly m nodes") {
  const ExternalField field = informative_field(50, 7, 1, 5);
  std::uint32_t informed = 0;
  for (std::uint32_t i = 0; i < 50; ++i) {
    if (field.informed[i]) {
      ++informed;
      CHECK(field.m_ext[i] != 0.0);
    } else {
      CHECK(field.m_ext[i] == 0.0);
    }
  }
  CHECK(informed == 7);
}

TEST_CASE("informed values carry the bias of the requested sign") {
  double sum_pos = 0.0;
  double sum_neg = 0.0;
  std::uint32_t count = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const ExternalField pos = informative_field(20, 5, 1, s);
    const ExternalField neg = informative_field(20, 5, -1, 100000 + s);
    for (std::uint32_t i = 0; i < 20; ++i) {
      if (pos.informed[i]) {
        sum_pos += pos.m_ext[i];
      }
      if (neg.informed[i]) {
        sum_neg += neg.m_ext[i];
      }
    }
    count += 5;
  }
  // Standard error of the mean is 0.05 / sqrt(10^4) = 5e-4.
  CHECK(sum_pos / count == doctest::Approx(0.05).epsilon(0.08));
  CHECK(sum_neg / count == doctest::Approx(-0.05).epsilon(0.08));
}

TEST_CASE("informed subsets are selected uniformly") {
  std::vector<double> hits(20, 0.0);
  const std::uint32_t fields = 10000;
  for (std::uint64_t s = 0; s < fields; ++s) {
    const ExternalField field = informative_field(20, 5, 1, mix_seed(3, s));
    for (std::uint32_t i = 0; i < 20; ++i) {
      if (field.informed[i]) {
        hits[i] += 1.0;
      }
    }
  }
  const double expected = fields * 5.0 / 20.0;
  double chi2 = 0.0;
  for (const double h : hits) {
    chi2 += (h - expected) * (h - expected) / expected;
  }
  // 0.99 quantile of chi-square with 19 degrees of freedom.
  CHECK(chi2 < 36.19086912927004);
}

TEST_CASE("spec validation rejects inconsistent combinations") {
  StimulusSpec spec;
  spec.kind = StimulusKind::Uninformative;
  spec.sigma_ext = 0.0;
  CHECK_THROWS_AS(spec.validate(10), ConfigError);
  spec.sigma_ext = 1.0;
  spec.bias = 0.1;
  CHECK_THROWS_AS(spec.validate(10), ConfigError);

  spec.kind = StimulusKind::Informative;
  spec.bias = 0.0;
  CHECK_THROWS_AS(spec.validate(10), ConfigError);
  spec.bias = 0.05;
  spec.informed_count = 0;
  CHECK_THROWS_AS(spec.validate(10), ConfigError);
  spec.informed_count = 11;
  CHECK_THROWS_AS(spec.validate(10), ConfigError);
  spec.informed_count = 10;
  CHECK_NOTHROW(spec.validate(10));
}

TEST_CASE("generate_field dispatches on the stimulus kind") {
  StimulusSpec spec;
  spec.kind = StimulusKind::Uninformative;
  spec.sigma_ext = 0.5;
  const ExternalField a = generate_field(30, spec, 9);
  CHECK(a.m_ext.size() == 30);
  CHECK(a.informed[29] == 1);

  spec.kind = StimulusKind::Informative;
  spec.sigma_ext = 0.05;
  spec.bias = -0.05;
  spec.informed_count = 4;
  double informed_sum = 0.0;
  for (std::uint64_t s = 0; s < 3000; ++s) {
    const ExternalField b = generate_field(30, spec, s);
    std::uint32_t m = 0;
    for (std::uint32_t i = 0; i < 30; ++i) {
      if (b.informed[i]) {
        ++m;
        informed_sum += b.m_ext[i];
      }
    }
    REQUIRE(m == 4);
  }
  CHECK(informed_sum / (3000.0 * 4.0) < -0.04);
}

TEST_CASE("invalid direct arguments are rejected") {
  CHECK_THROWS_AS(uninformative_field(5, -1.0, 1), ConfigError);
  CHECK_THROWS_AS(informative_field(5, 0, 1, 1), ConfigError);
  CHECK_THROWS_AS(informative_field(5, 6, 1, 1), ConfigError);
  CHECK_THROWS_AS(informative_field(5, 2, 0, 1), ConfigError);
}

}  // TEST_SUITE
