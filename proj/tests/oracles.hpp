// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the library's graph algorithms.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgaug/graph.hpp"
#include "kgaug/hierarchy.hpp"

namespace oracle {

inline std::string node_name(std::size_t i) { return "v" + std::to_string(i); }

/// Erdos-Renyi graph whose entity ids equal node indices.
inline kgaug::KnowledgeGraph random_graph(std::size_t n, double p, std::uint64_t seed,
                                          double parallel_prob = 0.0) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p), parallel(parallel_prob);
  kgaug::GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.intern_entity(node_name(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!edge(rng)) continue;
      b.add(node_name(i), "r", node_name(j));
      if (parallel(rng)) b.add(node_name(j), "s", node_name(i));
    }
  }
  return std::move(b).build();
}

inline kgaug::KnowledgeGraph from_edges(std::size_t n,
                                        const std::vector<std::pair<int, int>>& edges) {
  kgaug::GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.intern_entity(node_name(i));
  for (auto [u, v] : edges) b.add(node_name(u), "r", node_name(v));
  return std::move(b).build();
}

using AdjMatrix = std::vector<std::vector<char>>;

inline AdjMatrix adjacency(const kgaug::KnowledgeGraph& g) {
  const std::size_t n = g.entity_count();
  AdjMatrix a(n, std::vector<char>(n, 0));
  for (const auto& t : g.triples()) a[t.head][t.tail] = a[t.tail][t.head] = 1;
  return a;
}

inline constexpr int kInf = std::numeric_limits<int>::max() / 4;

/// Floyd-Warshall hop counts on the undirected view.
inline std::vector<std::vector<int>> all_pairs_hops(const kgaug::KnowledgeGraph& g) {
  const std::size_t n = g.entity_count();
  const auto a = adjacency(g);
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j]) d[i][j] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline bool induced_connected(const AdjMatrix& a, std::uint32_t mask, int skip = -1) {
  const int n = static_cast<int>(a.size());
  int start = -1, count = 0;
  for (int v = 0; v < n; ++v) {
    if ((mask >> v & 1U) && v != skip) {
      if (start < 0) start = v;
      ++count;
    }
  }
  if (count == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < n; ++w) {
      if (a[v][w] && !seen[w] && (mask >> w & 1U) && w != skip) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == count;
}

/// Induced subgraph on `mask` has no cut vertex and at least one edge
/// (two adjacent nodes count).
inline bool induced_biconnected(const AdjMatrix& a, std::uint32_t mask) {
  const int size = __builtin_popcount(mask);
  if (size < 2 || !induced_connected(a, mask)) return false;
  if (size == 2) return true;
  for (int v = 0; v < static_cast<int>(a.size()); ++v) {
    if ((mask >> v & 1U) && !induced_connected(a, mask, v)) return false;
  }
  return true;
}

struct BruteBlock {
  std::vector<kgaug::EntityId> nodes;
  std::vector<std::pair<kgaug::EntityId, kgaug::EntityId>> edges;
  auto operator<=>(const BruteBlock&) const = default;
};

/// Blocks by definition: inclusion-maximal node sets whose induced subgraph
/// survives the deletion of any one vertex, plus isolated vertices.
inline std::vector<BruteBlock> brute_force_blocks(const kgaug::KnowledgeGraph& g) {
  const auto a = adjacency(g);
  const int n = static_cast<int>(a.size());
  std::vector<std::uint32_t> good;
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    if (induced_biconnected(a, mask)) good.push_back(mask);
  }
  std::vector<BruteBlock> out;
  for (std::uint32_t m : good) {
    const bool maximal = std::none_of(good.begin(), good.end(), [&](std::uint32_t o) {
      return o != m && (o & m) == m;
    });
    if (!maximal) continue;
    BruteBlock b;
    for (int v = 0; v < n; ++v) {
      if (m >> v & 1U) b.nodes.push_back(static_cast<kgaug::EntityId>(v));
    }
    for (auto u : b.nodes)
      for (auto v : b.nodes)
        if (u < v && a[u][v]) b.edges.emplace_back(u, v);
    out.push_back(std::move(b));
  }
  for (int v = 0; v < n; ++v) {
    if (std::none_of(a[v].begin(), a[v].end(), [](char c) { return c != 0; })) {
      out.push_back({{static_cast<kgaug::EntityId>(v)}, {}});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Balanced tree of classes with entity leaves: `branching` children per
/// node down to `depth` levels below the root. Internal nodes are classes
/// (cc rows), the deepest level entities (ec rows).
inline kgaug::ClassHierarchy balanced_tree(std::size_t branching, std::size_t depth) {
  kgaug::HierarchyBuilder b;
  std::vector<std::string> frontier{std::string(kgaug::ClassHierarchy::kRootLabel)};
  for (std::size_t level = 1; level <= depth; ++level) {
    std::vector<std::string> next;
    for (const auto& parent : frontier) {
      for (std::size_t c = 0; c < branching; ++c) {
        std::string child = parent + "." + std::to_string(c);
        b.add(child, parent, level == depth);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  return std::move(b).build();
}

}  // namespace oracle
