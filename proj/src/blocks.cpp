#include <algorithm>

#include "kgaug/stats.hpp"

namespace kgaug {

namespace {

constexpr EntityId kNoParent = std::numeric_limits<EntityId>::max();

struct Frame {
  EntityId v;
  EntityId parent;
  std::size_t next = 0;
};

Block make_block(std::vector<std::pair<EntityId, EntityId>> edges) {
  Block b;
  for (auto& [a, c] : edges) {
    if (a > c) std::swap(a, c);
    b.nodes.push_back(a);
    b.nodes.push_back(c);
  }
  std::sort(edges.begin(), edges.end());
  std::sort(b.nodes.begin(), b.nodes.end());
  b.nodes.erase(std::unique(b.nodes.begin(), b.nodes.end()), b.nodes.end());
  b.edges = std::move(edges);
  return b;
}

}  // namespace

std::vector<Block> biconnected_components(const KnowledgeGraph& g) {
  const std::size_t n = g.entity_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<Block> blocks;
  std::vector<Frame> frames;
  std::vector<std::pair<EntityId, EntityId>> edge_stack;
  int clock = 0;

  for (EntityId root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    disc[root] = low[root] = clock++;
    if (g.neighbors(root).empty()) {
      blocks.push_back(Block{{root}, {}});
      continue;
    }
    frames.push_back({root, kNoParent});
    while (!frames.empty()) {
      Frame& f = frames.back();
      const EntityId v = f.v;
      auto nbrs = g.neighbors(v);
      if (f.next < nbrs.size()) {
        const EntityId w = nbrs[f.next++];
        if (disc[w] == -1) {
          edge_stack.emplace_back(v, w);
          disc[w] = low[w] = clock++;
          frames.push_back({w, v});  // invalidates f
        } else if (w != f.parent && disc[w] < disc[v]) {
          edge_stack.emplace_back(v, w);
          low[v] = std::min(low[v], disc[w]);
        }
        continue;
      }
      const EntityId parent = f.parent;
      frames.pop_back();
      if (parent == kNoParent) continue;
      low[parent] = std::min(low[parent], low[v]);
      if (low[v] >= disc[parent]) {
        std::vector<std::pair<EntityId, EntityId>> edges;
        while (true) {
          auto e = edge_stack.back();
          edge_stack.pop_back();
          edges.push_back(e);
          if (e.first == parent && e.second == v) break;
        }
        blocks.push_back(make_block(std::move(edges)));
      }
    }
  }
  return blocks;
}

std::vector<EntityId> articulation_points(const KnowledgeGraph& g) {
  std::vector<int> membership(g.entity_count(), 0);
  for (const Block& b : biconnected_components(g)) {
    if (b.edges.empty()) continue;
    for (EntityId v : b.nodes) ++membership[v];
  }
  std::vector<EntityId> out;
  for (EntityId v = 0; v < g.entity_count(); ++v) {
    if (membership[v] > 1) out.push_back(v);
  }
  return out;
}

double max_pbc_ratio(const KnowledgeGraph& g) {
  if (g.entity_count() == 0) throw GraphError("max_pbc_ratio: empty graph");
  std::size_t largest = 0;
  for (const Block& b : biconnected_components(g)) largest = std::max(largest, b.nodes.size());
  return static_cast<double>(largest) / static_cast<double>(g.entity_count());
}

}  // namespace kgaug
