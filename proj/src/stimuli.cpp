#include "opinet/stimuli.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opinet/common.hpp"
#include "opinet/rng.hpp"

namespace opinet {

void StimulusSpec::validate(std::uint32_t n) const {
  if (!(sigma_ext > 0.0) || !std::isfinite(sigma_ext)) {
    throw ConfigError("stimulus: sigma_ext must be positive and finite");
  }
  if (kind == StimulusKind::Uninformative) {
    if (bias != 0.0) {
      throw ConfigError("stimulus: uninformative fields must have bias = 0");
    }
  } else {
    if (bias == 0.0 || !std::isfinite(bias)) {
      throw ConfigError(
          "stimulus: informative fields need a nonzero finite bias");
    }
    if (informed_count < 1 || informed_count > n) {
      throw ConfigError("stimulus: informed_count must lie in [1, n], got " +
                        std::to_string(informed_count) + " with n = " +
                        std::to_string(n));
    }
  }
}

ExternalField uninformative_field(std::uint32_t n, double sigma_ext,
                                  std::uint64_t seed) {
  if (!(sigma_ext > 0.0)) {
    throw ConfigError("uninformative_field: sigma_ext must be positive");
  }
  Rng rng(seed);
  ExternalField field;
  field.m_ext.resize(n);
  field.informed.assign(n, 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    field.m_ext[i] = rng.normal(0.0, sigma_ext);
  }
  return field;
}

ExternalField informative_field(std::uint32_t n, std::uint32_t m,
                                int bias_sign, std::uint64_t seed,
                                double bias_magnitude, double sigma_ext) {
  if (bias_sign != 1 && bias_sign != -1) {
    throw ConfigError("informative_field: bias_sign must be +1 or -1");
  }
  if (m < 1 || m > n) {
    throw ConfigError("informative_field: m must lie in [1, n], got m = " +
                      std::to_string(m) + " with n = " + std::to_string(n));
  }
  if (!(sigma_ext > 0.0) || !(bias_magnitude > 0.0)) {
    throw ConfigError(
        "informative_field: bias magnitude and sigma_ext must be positive");
  }
  Rng rng(seed);
  std::vector<std::uint32_t> chosen = rng.sample_distinct(n, m);
  std::sort(chosen.begin(), chosen.end());

  ExternalField field;
  field.m_ext.assign(n, 0.0);
  field.informed.assign(n, 0);
  const double mean = bias_sign * bias_magnitude;
  for (const std::uint32_t node : chosen) {
    field.m_ext[node] = rng.normal(mean, sigma_ext);
    field.informed[node] = 1;
  }
  return field;
}

ExternalField generate_field(std::uint32_t n, const StimulusSpec& spec,
                             std::uint64_t seed) {
  spec.validate(n);
  if (spec.kind == StimulusKind::Uninformative) {
    return uninformative_field(n, spec.sigma_ext, seed);
  }
  const int sign = spec.bias > 0.0 ? 1 : -1;
  return informative_field(n, spec.informed_count, sign, seed,
                           std::fabs(spec.bias), spec.sigma_ext);
}

}  // namespace opinet
