#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "opinet/rng.hpp"

namespace opinet {

// Unordered edge in canonical form: first < second.
using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Per-edge coupling strengths, aligned with SocialGraph::edges() order.
using Couplings = std::vector<double>;

// Undirected simple graph over nodes 0..n-1 with a CSR adjacency view.
//
// Directed message slots: slot s lies in the CSR range of its owner node i
// and carries the message flowing from neighbors()[s] into i. reverse_slot(s)
// is the slot of the opposite direction on the same edge. Neighbor lists are
// sorted ascending, so a per-node gather over its slot range visits incoming
// messages in a fixed order regardless of how slots were produced.
class SocialGraph {
 public:
  SocialGraph() = default;

  // Validates and canonicalizes: endpoints in range, no self-loops, no
  // duplicates. Edges are stored sorted with first < second.
  static SocialGraph from_edges(std::uint32_t n, std::vector<Edge> edges);

  std::uint32_t node_count() const { return n_; }
  std::uint32_t edge_count() const {
    return static_cast<std::uint32_t>(edges_.size());
  }
  std::uint32_t slot_count() const {
    return static_cast<std::uint32_t>(neighbors_.size());
  }

  const std::vector<Edge>& edges() const { return edges_; }

  std::uint32_t degree(std::uint32_t node) const;
  bool has_edge(std::uint32_t a, std::uint32_t b) const;

  // CSR arrays. offsets() has n+1 entries; the slot range of node i is
  // [offsets()[i], offsets()[i+1]).
  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& neighbors() const { return neighbors_; }
  // slot -> index into edges()
  const std::vector<std::uint32_t>& slot_edge() const { return slot_edge_; }
  // slot -> node whose CSR range contains it (the message destination)
  const std::vector<std::uint32_t>& slot_owner() const { return slot_owner_; }
  // slot -> slot of the opposite direction
  const std::vector<std::uint32_t>& reverse_slot() const {
    return reverse_slot_;
  }

 private:
  std::uint32_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> neighbors_;
  std::vector<std::uint32_t> slot_edge_;
  std::vector<std::uint32_t> slot_owner_;
  std::vector<std::uint32_t> reverse_slot_;
};

// Watts-Strogatz small world: ring lattice connecting each node to its k
// nearest neighbors per side (degree 2k, n*k edges), then each original
// lattice edge is independently replaced, with probability beta, by an edge
// between two uniformly drawn distinct non-adjacent nodes. Lattice edges are
// visited in (distance 1..k, node 0..n-1) order; the edge under consideration
// is removed before the replacement pair is drawn, so a valid pair always
// exists and the original pair may be redrawn.
//
// Preconditions: n >= 3, 1 <= k < n/2, 0 <= beta <= 1.
SocialGraph generate_watts_strogatz(std::uint32_t n, std::uint32_t k,
                                    double beta, std::uint64_t seed);

struct LoadedGraph {
  SocialGraph graph;
  // new id -> id in the source file. Identity when the file declared its node
  // count via a "# n=<count>" header; otherwise sorted-unique original ids
  // compacted to 0..n-1.
  std::vector<std::uint64_t> original_ids;
  std::uint32_t dropped_self_loops = 0;
  std::uint32_t collapsed_duplicates = 0;
};

// Parses "u v" pairs, one per line; '#' lines are comments, except that a
// leading "# n=<count>" header fixes the node count (representing isolated
// nodes). Directed duplicates and repeated pairs collapse into one undirected
// edge; self-loops are dropped and counted. Malformed lines raise IoError
// naming the line number.
LoadedGraph load_edge_list(std::istream& in);

// J_ij ~ Uniform(0, j_max], independent per edge in canonical edge order,
// drawn as j_max * (1 - u) with u in [0,1). Zero is excluded: a zero coupling
// is indistinguishable from a missing edge.
Couplings sample_couplings(const SocialGraph& graph, double j_max,
                           std::uint64_t seed);

struct GraphStats {
  std::vector<std::uint64_t> degree_histogram;  // index = degree
  double mean_degree = 0.0;
  double clustering_coefficient = 0.0;  // mean local clustering, deg<2 -> 0
  double mean_path_length = 0.0;        // largest component only
  std::uint32_t largest_component_size = 0;
  std::uint32_t path_sources_used = 0;
};

// Shortest-path stats come from BFS over the largest connected component:
// exact (every component node is a source) when n <= 1000, otherwise from
// min(path_samples, component size) uniformly sampled sources.
GraphStats compute_stats(const SocialGraph& graph, std::uint32_t path_samples,
                         std::uint64_t seed);

}  // namespace opinet
