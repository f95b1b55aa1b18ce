#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "opinet/graph.hpp"
#include "opinet/rng.hpp"

namespace opinet_test {

// Uniform random labeled tree on n nodes decoded from a Pruefer sequence.
inline opinet::SocialGraph random_tree(std::uint32_t n, std::uint64_t seed) {
  using opinet::Edge;
  if (n == 1) {
    return opinet::SocialGraph::from_edges(1, {});
  }
  if (n == 2) {
    return opinet::SocialGraph::from_edges(2, {Edge{0, 1}});
  }
  opinet::Rng rng(seed);
  std::vector<std::uint32_t> seq(n - 2);
  for (auto& s : seq) {
    s = static_cast<std::uint32_t>(rng.uniform_int(n));
  }
  std::vector<std::uint32_t> degree(n, 1);
  for (const auto s : seq) {
    ++degree[s];
  }
  std::vector<Edge> edges;
  for (const auto s : seq) {
    for (std::uint32_t leaf = 0; leaf < n; ++leaf) {
      if (degree[leaf] == 1) {
        edges.emplace_back(std::min(leaf, s), std::max(leaf, s));
        --degree[leaf];
        --degree[s];
        break;
      }
    }
  }
  std::uint32_t u = 0xffffffffu;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (degree[i] == 1) {
      if (u == 0xffffffffu) {
        u = i;
      } else {
        edges.emplace_back(u, i);
      }
    }
  }
  return opinet::SocialGraph::from_edges(n, std::move(edges));
}

// Preferential attachment graph with a heavy-tailed degree distribution:
// an (m+1)-clique seed, then each new node wires to m distinct existing
// nodes drawn proportional to current degree.
inline opinet::SocialGraph heavy_tail_graph(std::uint32_t n, std::uint32_t m,
                                            std::uint64_t seed) {
  using opinet::Edge;
  opinet::Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<std::uint32_t> stubs;  // node id repeated once per degree unit
  for (std::uint32_t a = 0; a + 1 <= m; ++a) {
    for (std::uint32_t b = a + 1; b <= m; ++b) {
      edges.emplace_back(a, b);
      stubs.push_back(a);
      stubs.push_back(b);
    }
  }
  for (std::uint32_t node = m + 1; node < n; ++node) {
    std::vector<std::uint32_t> picked;
    while (picked.size() < m) {
      const std::uint32_t target =
          stubs[rng.uniform_int(stubs.size())];
      bool fresh = true;
      for (const auto p : picked) {
        fresh = fresh && p != target;
      }
      if (fresh) {
        picked.push_back(target);
      }
    }
    for (const auto target : picked) {
      edges.emplace_back(target, node);
      stubs.push_back(target);
      stubs.push_back(node);
    }
  }
  return opinet::SocialGraph::from_edges(n, std::move(edges));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<std::uint64_t> counter{0};
    const std::uint64_t id = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("opinet_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace opinet_test
