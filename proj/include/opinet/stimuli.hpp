#pragma once

#include <cstdint>
#include <vector>

namespace opinet {

enum class StimulusKind { Uninformative, Informative };

// Per-node external evidence in log-odds units. Nodes outside the informed
// mask carry exactly 0.
struct ExternalField {
  std::vector<double> m_ext;
  std::vector<std::uint8_t> informed;  // 1 where evidence was injected
};

struct StimulusSpec {
  StimulusKind kind = StimulusKind::Uninformative;
  double sigma_ext = 1.0;
  // Signed mean of informative evidence; must be 0 for uninformative fields.
  double bias = 0.0;
  // Number of informed nodes; informative fields only.
  std::uint32_t informed_count = 0;

  // Throws ConfigError when the combination is inconsistent for a graph of
  // n nodes.
  void validate(std::uint32_t n) const;
};

// Every node informed, i.i.d. Normal(0, sigma_ext^2).
ExternalField uninformative_field(std::uint32_t n, double sigma_ext,
                                  std::uint64_t seed);

// m distinct nodes drawn uniformly; each receives
// Normal(bias_sign * bias_magnitude, sigma_ext^2); all other nodes are
// exactly 0. Values are assigned in ascending node order of the selected
// subset, so the stream layout is independent of the draw order.
ExternalField informative_field(std::uint32_t n, std::uint32_t m,
                                int bias_sign, std::uint64_t seed,
                                double bias_magnitude = 0.05,
                                double sigma_ext = 0.05);

// Dispatch on spec.kind. Informative specs use |spec.bias| as the magnitude
// and its sign as the correct-choice sign.
ExternalField generate_field(std::uint32_t n, const StimulusSpec& spec,
                             std::uint64_t seed);

}  // namespace opinet
