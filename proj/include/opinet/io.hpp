#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "opinet/engine.hpp"
#include "opinet/graph.hpp"
#include "opinet/metrics.hpp"

namespace opinet {

// FNV-1a over the raw bytes.
std::uint64_t fnv1a64(std::string_view data);

// Hash of the canonical serialization (sorted keys, no whitespace).
std::uint64_t config_hash(const nlohmann::json& config);

// %.17g, which round-trips any double exactly.
std::string format_double(double value);

// Stamp written as comment lines at the top of every CSV. Holds no
// timestamp on purpose: rerunning a configuration must reproduce output
// files byte for byte. Wall-clock time goes into the provenance.json
// sidecar instead.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

void write_provenance_header(std::ostream& out, const Provenance& provenance);

// Sidecar carrying the full configuration, its hash, and the generation
// time.
void write_provenance_json(const std::string& path,
                           const nlohmann::json& config, std::uint64_t seed);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// One evaluation trial: radicalization, polarization, percent of nodes
// choosing correctly, fraction more confident than the universal observer,
// and the universal observer's own belief.
struct TrialSummary {
  std::uint32_t trial = 0;
  double r = 0.0;
  double p = 0.0;
  double pct_correct = 0.0;
  double frac_overconfident = 0.0;
  double b_univ = 0.0;
};

// "# n=<count>" header followed by one "a b" line per edge.
void save_edge_list(const std::string& path, const SocialGraph& graph,
                    const Provenance& provenance);

// "i,j,J" in canonical edge order.
void save_couplings(const std::string& path, const SocialGraph& graph,
                    const Couplings& couplings, const Provenance& provenance);
Couplings load_couplings(const std::string& path, const SocialGraph& graph);

// A "node,kappa" section followed by an "i,j,alpha" section.
void save_control_params(const std::string& path, const SocialGraph& graph,
                         const ControlParams& params,
                         const Provenance& provenance);
ControlParams load_control_params(const std::string& path,
                                  const SocialGraph& graph);

// "node,m_ext".
void save_stimulus(const std::string& path, const std::vector<double>& m_ext,
                   const Provenance& provenance);
std::vector<double> load_stimulus(const std::string& path);

// "node,p_yes".
void save_marginals(const std::string& path, const std::vector<double>& p_yes,
                    const Provenance& provenance);
std::vector<double> load_marginals(const std::string& path);

// "node,belief,p_yes".
void save_beliefs(const std::string& path, const std::vector<double>& beliefs,
                  const Provenance& provenance);

// "iter,node,belief" for every recorded sweep.
void save_trajectory(const std::string& path,
                     const std::vector<std::vector<double>>& trajectory,
                     const Provenance& provenance);

// "bin_lo,bin_hi,count".
void save_histogram(const std::string& path, const BeliefHistogram& histogram,
                    const Provenance& provenance);
BeliefHistogram load_histogram(const std::string& path);

// "trial,R,P,pct_correct,frac_overconfident,B_univ".
void save_trial_summaries(const std::string& path,
                          const std::vector<TrialSummary>& rows,
                          const Provenance& provenance);
std::vector<TrialSummary> load_trial_summaries(const std::string& path);

// Generic numeric table with a fixed header line.
void save_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<double>>& rows,
              const Provenance& provenance);

// Reads a CSV written by this module: '#' lines are comments, the first
// remaining line must equal expected_header, and every following row holds
// one number per column. Raises IoError with path:line on any deviation.
std::vector<std::vector<double>> load_csv(const std::string& path,
                                          const std::string& expected_header);

// Same table format with preformatted cells, for tables that mix labels and
// numbers.
void save_raw_csv(const std::string& path, const std::string& header,
                  const std::vector<std::vector<std::string>>& rows,
                  const Provenance& provenance);
std::vector<std::vector<std::string>> load_raw_csv(
    const std::string& path, const std::string& expected_header);

}  // namespace opinet
