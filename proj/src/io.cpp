#include "opinet/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "opinet/common.hpp"

namespace opinet {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw IoError("failed while writing " + path);
  }
}

// Yields non-empty, non-comment lines and tracks positions for error text.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) {
      throw IoError("cannot open " + path);
    }
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.empty() || line[0] == '#') {
        continue;
      }
      return true;
    }
    return false;
  }

  std::string where() const {
    return path_ + ":" + std::to_string(lineno_);
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t lineno_ = 0;
};

std::vector<std::string_view> split_fields(const std::string& line) {
  std::vector<std::string_view> fields;
  const std::string_view view(line);
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = view.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(view.substr(start));
      return fields;
    }
    fields.push_back(view.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double_field(std::string_view token, const LineReader& reader) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw IoError(reader.where() + ": expected a number, got '" +
                  std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw IoError(reader.where() + ": non-finite value");
  }
  return value;
}

std::uint64_t parse_u64_field(std::string_view token,
                              const LineReader& reader) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw IoError(reader.where() + ": expected a non-negative integer, got '" +
                  std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> expect_fields(const std::string& line,
                                            std::size_t count,
                                            const LineReader& reader) {
  auto fields = split_fields(line);
  if (fields.size() != count) {
    throw IoError(reader.where() + ": expected " + std::to_string(count) +
                  " fields, got " + std::to_string(fields.size()));
  }
  return fields;
}

void expect_header(LineReader& reader, const std::string& header) {
  std::string line;
  if (!reader.next(line) || line != header) {
    throw IoError(reader.where() + ": expected header '" + header + "'");
  }
}

void expect_eof(LineReader& reader) {
  std::string line;
  if (reader.next(line)) {
    throw IoError(reader.where() + ": unexpected trailing data");
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t config_hash(const nlohmann::json& config) {
  return fnv1a64(config.dump());
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string hash_hex(std::uint64_t hash) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace

void write_provenance_header(std::ostream& out, const Provenance& provenance) {
  out << "# config_hash=" << hash_hex(provenance.config_hash) << "\n"
      << "# seed=" << provenance.seed << "\n"
      << "# version=" << kVersion << "\n";
}

void write_provenance_json(const std::string& path,
                           const nlohmann::json& config, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&tt, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);

  nlohmann::json sidecar;
  sidecar["config"] = config;
  sidecar["config_hash"] = hash_hex(config_hash(config));
  sidecar["seed"] = seed;
  sidecar["version"] = kVersion;
  sidecar["generated_at"] = stamp;

  auto out = open_for_write(path);
  out << sidecar.dump(2) << "\n";
  finish_write(out, path);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return parsed;
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_for_write(path);
  out << content;
  finish_write(out, path);
}

void save_edge_list(const std::string& path, const SocialGraph& graph,
                    const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "# n=" << graph.node_count() << "\n";
  for (const Edge& e : graph.edges()) {
    out << e.first << " " << e.second << "\n";
  }
  finish_write(out, path);
}

void save_couplings(const std::string& path, const SocialGraph& graph,
                    const Couplings& couplings, const Provenance& provenance) {
  if (couplings.size() != graph.edge_count()) {
    throw ConfigError("save_couplings: size does not match edge count");
  }
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "i,j,J\n";
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edges()[e];
    out << edge.first << "," << edge.second << ","
        << format_double(couplings[e]) << "\n";
  }
  finish_write(out, path);
}

Couplings load_couplings(const std::string& path, const SocialGraph& graph) {
  LineReader reader(path);
  expect_header(reader, "i,j,J");
  Couplings couplings(graph.edge_count());
  std::string line;
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    if (!reader.next(line)) {
      throw IoError(reader.where() + ": expected " +
                    std::to_string(graph.edge_count()) + " coupling rows");
    }
    const auto fields = expect_fields(line, 3, reader);
    const std::uint64_t i = parse_u64_field(fields[0], reader);
    const std::uint64_t j = parse_u64_field(fields[1], reader);
    const Edge& edge = graph.edges()[e];
    if (i != edge.first || j != edge.second) {
      throw IoError(reader.where() + ": edge " + std::to_string(i) + "," +
                    std::to_string(j) + " does not match graph edge " +
                    std::to_string(edge.first) + "," +
                    std::to_string(edge.second));
    }
    couplings[e] = parse_double_field(fields[2], reader);
  }
  expect_eof(reader);
  return couplings;
}

void save_control_params(const std::string& path, const SocialGraph& graph,
                         const ControlParams& params,
                         const Provenance& provenance) {
  if (params.alpha.size() != graph.edge_count() ||
      params.kappa.size() != graph.node_count()) {
    throw ConfigError("save_control_params: sizes do not match the graph");
  }
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "node,kappa\n";
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    out << i << "," << format_double(params.kappa[i]) << "\n";
  }
  out << "i,j,alpha\n";
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edges()[e];
    out << edge.first << "," << edge.second << ","
        << format_double(params.alpha[e]) << "\n";
  }
  finish_write(out, path);
}

ControlParams load_control_params(const std::string& path,
                                  const SocialGraph& graph) {
  LineReader reader(path);
  expect_header(reader, "node,kappa");
  ControlParams params;
  params.kappa.resize(graph.node_count());
  params.alpha.resize(graph.edge_count());
  std::string line;
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    if (!reader.next(line)) {
      throw IoError(reader.where() + ": expected " +
                    std::to_string(graph.node_count()) + " kappa rows");
    }
    const auto fields = expect_fields(line, 2, reader);
    if (parse_u64_field(fields[0], reader) != i) {
      throw IoError(reader.where() + ": kappa rows must list nodes 0.." +
                    std::to_string(graph.node_count() - 1) + " in order");
    }
    params.kappa[i] = parse_double_field(fields[1], reader);
  }
  expect_header(reader, "i,j,alpha");
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    if (!reader.next(line)) {
      throw IoError(reader.where() + ": expected " +
                    std::to_string(graph.edge_count()) + " alpha rows");
    }
    const auto fields = expect_fields(line, 3, reader);
    const std::uint64_t i = parse_u64_field(fields[0], reader);
    const std::uint64_t j = parse_u64_field(fields[1], reader);
    const Edge& edge = graph.edges()[e];
    if (i != edge.first || j != edge.second) {
      throw IoError(reader.where() + ": edge " + std::to_string(i) + "," +
                    std::to_string(j) + " does not match graph edge " +
                    std::to_string(edge.first) + "," +
                    std::to_string(edge.second));
    }
    params.alpha[e] = parse_double_field(fields[2], reader);
  }
  expect_eof(reader);
  return params;
}

void save_stimulus(const std::string& path, const std::vector<double>& m_ext,
                   const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "node,m_ext\n";
  for (std::size_t i = 0; i < m_ext.size(); ++i) {
    out << i << "," << format_double(m_ext[i]) << "\n";
  }
  finish_write(out, path);
}

std::vector<double> load_stimulus(const std::string& path) {
  LineReader reader(path);
  expect_header(reader, "node,m_ext");
  std::vector<double> m_ext;
  std::string line;
  while (reader.next(line)) {
    const auto fields = expect_fields(line, 2, reader);
    if (parse_u64_field(fields[0], reader) != m_ext.size()) {
      throw IoError(reader.where() + ": rows must list nodes from 0 in order");
    }
    m_ext.push_back(parse_double_field(fields[1], reader));
  }
  if (m_ext.empty()) {
    throw IoError(path + ": no stimulus rows");
  }
  return m_ext;
}

void save_marginals(const std::string& path, const std::vector<double>& p_yes,
                    const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "node,p_yes\n";
  for (std::size_t i = 0; i < p_yes.size(); ++i) {
    out << i << "," << format_double(p_yes[i]) << "\n";
  }
  finish_write(out, path);
}

std::vector<double> load_marginals(const std::string& path) {
  LineReader reader(path);
  expect_header(reader, "node,p_yes");
  std::vector<double> p_yes;
  std::string line;
  while (reader.next(line)) {
    const auto fields = expect_fields(line, 2, reader);
    if (parse_u64_field(fields[0], reader) != p_yes.size()) {
      throw IoError(reader.where() + ": rows must list nodes from 0 in order");
    }
    const double p = parse_double_field(fields[1], reader);
    if (p < 0.0 || p > 1.0) {
      throw IoError(reader.where() + ": probability outside [0, 1]");
    }
    p_yes.push_back(p);
  }
  if (p_yes.empty()) {
    throw IoError(path + ": no marginal rows");
  }
  return p_yes;
}

void save_beliefs(const std::string& path, const std::vector<double>& beliefs,
                  const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "node,belief,p_yes\n";
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    out << i << "," << format_double(beliefs[i]) << ","
        << format_double(belief_to_probability(beliefs[i])) << "\n";
  }
  finish_write(out, path);
}

void save_trajectory(const std::string& path,
                     const std::vector<std::vector<double>>& trajectory,
                     const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "iter,node,belief\n";
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    for (std::size_t i = 0; i < trajectory[t].size(); ++i) {
      out << t << "," << i << "," << format_double(trajectory[t][i]) << "\n";
    }
  }
  finish_write(out, path);
}

void save_histogram(const std::string& path, const BeliefHistogram& histogram,
                    const Provenance& provenance) {
  if (histogram.edges.size() != histogram.counts.size() + 1) {
    throw ConfigError("save_histogram: edges must outnumber counts by one");
  }
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    out << format_double(histogram.edges[b]) << ","
        << format_double(histogram.edges[b + 1]) << "," << histogram.counts[b]
        << "\n";
  }
  finish_write(out, path);
}

BeliefHistogram load_histogram(const std::string& path) {
  LineReader reader(path);
  expect_header(reader, "bin_lo,bin_hi,count");
  BeliefHistogram histogram;
  std::string line;
  while (reader.next(line)) {
    const auto fields = expect_fields(line, 3, reader);
    const double lo = parse_double_field(fields[0], reader);
    const double hi = parse_double_field(fields[1], reader);
    if (histogram.edges.empty()) {
      histogram.edges.push_back(lo);
    } else if (histogram.edges.back() != lo) {
      throw IoError(reader.where() + ": bins are not contiguous");
    }
    if (!(hi > lo)) {
      throw IoError(reader.where() + ": bin_hi must exceed bin_lo");
    }
    histogram.edges.push_back(hi);
    histogram.counts.push_back(parse_u64_field(fields[2], reader));
  }
  if (histogram.counts.empty()) {
    throw IoError(path + ": no histogram rows");
  }
  return histogram;
}

void save_trial_summaries(const std::string& path,
                          const std::vector<TrialSummary>& rows,
                          const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << "trial,R,P,pct_correct,frac_overconfident,B_univ\n";
  for (const TrialSummary& row : rows) {
    out << row.trial << "," << format_double(row.r) << ","
        << format_double(row.p) << "," << format_double(row.pct_correct)
        << "," << format_double(row.frac_overconfident) << ","
        << format_double(row.b_univ) << "\n";
  }
  finish_write(out, path);
}

std::vector<TrialSummary> load_trial_summaries(const std::string& path) {
  LineReader reader(path);
  expect_header(reader, "trial,R,P,pct_correct,frac_overconfident,B_univ");
  std::vector<TrialSummary> rows;
  std::string line;
  while (reader.next(line)) {
    const auto fields = expect_fields(line, 6, reader);
    TrialSummary row;
    row.trial = static_cast<std::uint32_t>(parse_u64_field(fields[0], reader));
    row.r = parse_double_field(fields[1], reader);
    row.p = parse_double_field(fields[2], reader);
    row.pct_correct = parse_double_field(fields[3], reader);
    row.frac_overconfident = parse_double_field(fields[4], reader);
    row.b_univ = parse_double_field(fields[5], reader);
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw IoError(path + ": no trial rows");
  }
  return rows;
}

void save_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<double>>& rows,
              const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) {
        out << ",";
      }
      out << format_double(row[c]);
    }
    out << "\n";
  }
  finish_write(out, path);
}

std::vector<std::vector<double>> load_csv(const std::string& path,
                                          const std::string& expected_header) {
  LineReader reader(path);
  expect_header(reader, expected_header);
  const std::size_t columns = split_fields(expected_header).size();
  std::vector<std::vector<double>> rows;
  std::string line;
  while (reader.next(line)) {
    const auto fields = expect_fields(line, columns, reader);
    std::vector<double> row(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      row[c] = parse_double_field(fields[c], reader);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_raw_csv(const std::string& path, const std::string& header,
                  const std::vector<std::vector<std::string>>& rows,
                  const Provenance& provenance) {
  auto out = open_for_write(path);
  write_provenance_header(out, provenance);
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) {
        out << ",";
      }
      out << row[c];
    }
    out << "\n";
  }
  finish_write(out, path);
}

std::vector<std::vector<std::string>> load_raw_csv(
    const std::string& path, const std::string& expected_header) {
  LineReader reader(path);
  expect_header(reader, expected_header);
  const std::size_t columns = split_fields(expected_header).size();
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (reader.next(line)) {
    const auto fields = expect_fields(line, columns, reader);
    std::vector<std::string> row;
    row.reserve(columns);
    for (const auto field : fields) {
      row.emplace_back(field);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace opinet
