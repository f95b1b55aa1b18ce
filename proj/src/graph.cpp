#include "opinet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <istream>
#include <string>
#include <unordered_set>

#include "opinet/common.hpp"

namespace opinet {

SocialGraph SocialGraph::from_edges(std::uint32_t n, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.first == e.second) {
      throw ConfigError("graph: self-loop at node " + std::to_string(e.first));
    }
    if (e.first >= n || e.second >= n) {
      throw ConfigError("graph: edge {" + std::to_string(e.first) + "," +
                        std::to_string(e.second) + "} references a node >= " +
                        std::to_string(n));
    }
    if (e.first > e.second) {
      std::swap(e.first, e.second);
    }
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw ConfigError("graph: duplicate edge {" + std::to_string(dup->first) +
                      "," + std::to_string(dup->second) + "}");
  }

  SocialGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);

  const std::uint32_t m = g.edge_count();
  std::vector<std::uint32_t> deg(n, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.first];
    ++deg[e.second];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  }
  const std::uint32_t slots = 2 * m;
  g.neighbors_.assign(slots, 0);
  g.slot_edge_.assign(slots, 0);
  g.slot_owner_.assign(slots, 0);
  g.reverse_slot_.assign(slots, 0);

  // Edges are processed in sorted order, which leaves every neighbor list
  // sorted ascending without a separate pass: node i's neighbors j < i are
  // written while edges (j, i) stream by in ascending j, all before the
  // (i, j) edges append the neighbors j > i, also ascending.
  std::vector<std::uint32_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::uint32_t e = 0; e < m; ++e) {
    const auto [a, b] = g.edges_[e];
    const std::uint32_t sa = cursor[a]++;  // slot owned by a, neighbor b
    const std::uint32_t sb = cursor[b]++;  // slot owned by b, neighbor a
    g.neighbors_[sa] = b;
    g.neighbors_[sb] = a;
    g.slot_edge_[sa] = e;
    g.slot_edge_[sb] = e;
    g.slot_owner_[sa] = a;
    g.slot_owner_[sb] = b;
    g.reverse_slot_[sa] = sb;
    g.reverse_slot_[sb] = sa;
  }
  return g;
}

std::uint32_t SocialGraph::degree(std::uint32_t node) const {
  if (node >= n_) {
    throw ConfigError("graph: node " + std::to_string(node) + " out of range");
  }
  return offsets_[node + 1] - offsets_[node];
}

bool SocialGraph::has_edge(std::uint32_t a, std::uint32_t b) const {
  if (a >= n_ || b >= n_ || a == b) {
    return false;
  }
  // Search the smaller adjacency list.
  if (degree(a) > degree(b)) {
    std::swap(a, b);
  }
  const auto lo = neighbors_.begin() + offsets_[a];
  const auto hi = neighbors_.begin() + offsets_[a + 1];
  return std::binary_search(lo, hi, b);
}

SocialGraph generate_watts_strogatz(std::uint32_t n, std::uint32_t k,
                                    double beta, std::uint64_t seed) {
  if (n < 3) {
    throw ConfigError("watts_strogatz: n must be >= 3, got " +
                      std::to_string(n));
  }
  if (k < 1 || 2 * k >= n) {
    throw ConfigError("watts_strogatz: k must satisfy 1 <= k < n/2, got k=" +
                      std::to_string(k) + " with n=" + std::to_string(n));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("watts_strogatz: beta must lie in [0,1], got " +
                      std::to_string(beta));
  }

  std::vector<std::unordered_set<std::uint32_t>> adj(n);
  auto connect = [&](std::uint32_t a, std::uint32_t b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  auto disconnect = [&](std::uint32_t a, std::uint32_t b) {
    adj[a].erase(b);
    adj[b].erase(a);
  };
  auto adjacent = [&](std::uint32_t a, std::uint32_t b) {
    return adj[a].count(b) != 0;
  };

  // 1) ring lattice: k neighbors per side. (i, i+d mod n) with d = 1..k lists
  //    every lattice edge exactly once since k < n/2.
  std::vector<Edge> lattice;
  lattice.reserve(static_cast<std::size_t>(n) * k);
  for (std::uint32_t d = 1; d <= k; ++d) {
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t j = (i + d) % n;
      lattice.emplace_back(i, j);
      connect(i, j);
    }
  }

  // 2) independent rewiring of each original lattice edge.
  Rng rng(seed);
  for (const auto& [a, b] : lattice) {
    if (rng.uniform01() >= beta) {
      continue;
    }
    disconnect(a, b);
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    do {
      x = static_cast<std::uint32_t>(rng.uniform_int(n));
      y = static_cast<std::uint32_t>(rng.uniform_int(n));
    } while (x == y || adjacent(x, y));
    connect(x, y);
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * k);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const std::uint32_t j : adj[i]) {
      if (i < j) {
        edges.emplace_back(i, j);
      }
    }
  }
  return SocialGraph::from_edges(n, std::move(edges));
}

namespace {

bool parse_u64(std::string_view token, std::uint64_t& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc{} && result.ptr == last;
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  bool have_header = false;
  std::uint64_t header_n = 0;
  std::uint32_t self_loops = 0;
  std::uint64_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) {
      continue;
    }
    if (line[pos] == '#') {
      // "# n=<count>" fixes the node count; the first such header wins.
      std::string_view rest(line);
      rest.remove_prefix(pos + 1);
      const std::size_t ns = rest.find_first_not_of(" \t");
      if (!have_header && ns != std::string_view::npos &&
          rest.substr(ns).rfind("n=", 0) == 0) {
        if (!parse_u64(rest.substr(ns + 2), header_n)) {
          throw IoError("edge list line " + std::to_string(line_no) +
                        ": malformed node-count header");
        }
        have_header = true;
      }
      continue;
    }
    std::uint64_t ids[2];
    int found = 0;
    std::size_t cursor = pos;
    while (cursor < line.size()) {
      const std::size_t start = line.find_first_not_of(" \t", cursor);
      if (start == std::string::npos) {
        break;
      }
      std::size_t end = line.find_first_of(" \t", start);
      if (end == std::string::npos) {
        end = line.size();
      }
      if (found >= 2 ||
          !parse_u64(std::string_view(line).substr(start, end - start),
                     ids[found])) {
        throw IoError("edge list line " + std::to_string(line_no) +
                      ": expected two non-negative integers, got \"" + line +
                      "\"");
      }
      ++found;
      cursor = end;
    }
    if (found != 2) {
      throw IoError("edge list line " + std::to_string(line_no) +
                    ": expected two non-negative integers, got \"" + line +
                    "\"");
    }
    if (ids[0] == ids[1]) {
      ++self_loops;
      continue;
    }
    raw.emplace_back(std::min(ids[0], ids[1]), std::max(ids[0], ids[1]));
  }

  LoadedGraph result;
  result.dropped_self_loops = self_loops;

  std::uint32_t n = 0;
  std::vector<Edge> edges;
  edges.reserve(raw.size());

  if (have_header) {
    if (header_n > 0xFFFFFFFFull) {
      throw IoError("edge list: declared node count " +
                    std::to_string(header_n) + " exceeds the supported range");
    }
    n = static_cast<std::uint32_t>(header_n);
    for (const auto& [u, v] : raw) {
      if (u >= n || v >= n) {
        throw IoError("edge list: node id " + std::to_string(std::max(u, v)) +
                      " exceeds declared node count " + std::to_string(n));
      }
      edges.emplace_back(static_cast<std::uint32_t>(u),
                         static_cast<std::uint32_t>(v));
    }
    result.original_ids.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      result.original_ids[i] = i;
    }
  } else {
    std::vector<std::uint64_t> ids;
    ids.reserve(raw.size() * 2);
    for (const auto& [u, v] : raw) {
      ids.push_back(u);
      ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() > 0xFFFFFFFFull) {
      throw IoError("edge list: too many distinct node ids");
    }
    n = static_cast<std::uint32_t>(ids.size());
    auto remap = [&](std::uint64_t id) {
      return static_cast<std::uint32_t>(
          std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (const auto& [u, v] : raw) {
      edges.emplace_back(remap(u), remap(v));
    }
    result.original_ids = std::move(ids);
  }

  std::sort(edges.begin(), edges.end());
  const auto last = std::unique(edges.begin(), edges.end());
  result.collapsed_duplicates =
      static_cast<std::uint32_t>(edges.end() - last);
  edges.erase(last, edges.end());

  result.graph = SocialGraph::from_edges(n, std::move(edges));
  return result;
}

Couplings sample_couplings(const SocialGraph& graph, double j_max,
                           std::uint64_t seed) {
  if (!(j_max > 0.0)) {
    throw ConfigError("sample_couplings: j_max must be positive, got " +
                      std::to_string(j_max));
  }
  Rng rng(seed);
  Couplings j(graph.edge_count());
  for (double& value : j) {
    value = j_max * (1.0 - rng.uniform01());  // lands in (0, j_max]
  }
  return j;
}

GraphStats compute_stats(const SocialGraph& graph, std::uint32_t path_samples,
                         std::uint64_t seed) {
  const std::uint32_t n = graph.node_count();
  if (n == 0) {
    throw ConfigError("compute_stats: empty graph");
  }

  GraphStats stats;
  std::uint32_t max_degree = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    max_degree = std::max(max_degree, graph.degree(i));
  }
  stats.degree_histogram.assign(max_degree + 1, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    ++stats.degree_histogram[graph.degree(i)];
  }
  stats.mean_degree = 2.0 * graph.edge_count() / n;

  // Mean local clustering; nodes with degree < 2 contribute 0.
  const auto& offsets = graph.offsets();
  const auto& neighbors = graph.neighbors();
  double clustering_sum = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t deg = graph.degree(i);
    if (deg < 2) {
      continue;
    }
    std::uint64_t links = 0;
    for (std::uint32_t s = offsets[i]; s < offsets[i + 1]; ++s) {
      for (std::uint32_t t = s + 1; t < offsets[i + 1]; ++t) {
        if (graph.has_edge(neighbors[s], neighbors[t])) {
          ++links;
        }
      }
    }
    clustering_sum +=
        2.0 * static_cast<double>(links) / (static_cast<double>(deg) * (deg - 1));
  }
  stats.clustering_coefficient = clustering_sum / n;

  // Largest connected component via BFS label passes.
  std::vector<std::uint32_t> component(n, 0xFFFFFFFFu);
  std::uint32_t n_components = 0;
  std::vector<std::uint32_t> component_size;
  std::deque<std::uint32_t> queue;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (component[start] != 0xFFFFFFFFu) {
      continue;
    }
    const std::uint32_t label = n_components++;
    component_size.push_back(0);
    component[start] = label;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::uint32_t u = queue.front();
      queue.pop_front();
      ++component_size[label];
      for (std::uint32_t s = offsets[u]; s < offsets[u + 1]; ++s) {
        const std::uint32_t v = neighbors[s];
        if (component[v] == 0xFFFFFFFFu) {
          component[v] = label;
          queue.push_back(v);
        }
      }
    }
  }
  std::uint32_t largest_label = 0;
  for (std::uint32_t c = 1; c < n_components; ++c) {
    if (component_size[c] > component_size[largest_label]) {
      largest_label = c;
    }
  }
  stats.largest_component_size = component_size[largest_label];

  std::vector<std::uint32_t> members;
  members.reserve(stats.largest_component_size);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (component[i] == largest_label) {
      members.push_back(i);
    }
  }

  if (members.size() < 2) {
    stats.mean_path_length = 0.0;
    stats.path_sources_used = 0;
    return stats;
  }

  std::vector<std::uint32_t> sources;
  if (n <= 1000) {
    sources = members;  // exact: every component node is a source
  } else {
    const std::uint32_t want = std::min<std::uint32_t>(
        path_samples, static_cast<std::uint32_t>(members.size()));
    if (want == 0) {
      throw ConfigError("compute_stats: path_samples must be >= 1 for graphs "
                        "with more than 1000 nodes");
    }
    Rng rng(seed);
    for (const std::uint32_t idx :
         rng.sample_distinct(static_cast<std::uint32_t>(members.size()),
                             want)) {
      sources.push_back(members[idx]);
    }
  }

  std::uint64_t distance_sum = 0;
  std::uint64_t pair_count = 0;
  std::vector<std::uint32_t> dist(n);
  for (const std::uint32_t src : sources) {
    std::fill(dist.begin(), dist.end(), 0xFFFFFFFFu);
    dist[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
      const std::uint32_t u = queue.front();
      queue.pop_front();
      for (std::uint32_t s = offsets[u]; s < offsets[u + 1]; ++s) {
        const std::uint32_t v = neighbors[s];
        if (dist[v] == 0xFFFFFFFFu) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (const std::uint32_t node : members) {
      if (node != src) {
        distance_sum += dist[node];
        ++pair_count;
      }
    }
  }
  stats.mean_path_length =
      static_cast<double>(distance_sum) / static_cast<double>(pair_count);
  stats.path_sources_used = static_cast<std::uint32_t>(sources.size());
  return stats;
}

}  // namespace opinet
