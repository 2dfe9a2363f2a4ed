#include "kgaug/graph.hpp"

#include <algorithm>
#include <deque>

#include "kgaug/text.hpp"

namespace kgaug {

namespace {

std::uint64_t pair_key(EntityId a, EntityId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::optional<EntityId> KnowledgeGraph::find(std::string_view label) const {
  auto it = index_.find(normalize_label(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Arc> KnowledgeGraph::arcs(EntityId id) const {
  check(id);
  return {arcs_.data() + arc_offsets_[id], arcs_.data() + arc_offsets_[id + 1]};
}

std::span<const TripleId> KnowledgeGraph::outgoing(EntityId id) const {
  check(id);
  return {out_.data() + out_offsets_[id], out_.data() + out_offsets_[id + 1]};
}

std::span<const EntityId> KnowledgeGraph::neighbors(EntityId id) const {
  check(id);
  return {nbrs_.data() + nbr_offsets_[id], nbrs_.data() + nbr_offsets_[id + 1]};
}

bool KnowledgeGraph::adjacent(EntityId a, EntityId b) const {
  auto n = neighbors(a);
  return std::binary_search(n.begin(), n.end(), b);
}

void KnowledgeGraph::check(EntityId id) const {
  if (id >= labels_.size()) {
    throw GraphError("unknown entity id " + std::to_string(id));
  }
}

EntityId GraphBuilder::intern_entity(std::string_view label) {
  std::string key = normalize_label(label);
  auto [it, inserted] = index_.try_emplace(key, static_cast<EntityId>(labels_.size()));
  if (inserted) labels_.push_back(std::move(key));
  return it->second;
}

RelationId GraphBuilder::intern_relation(const std::string& label) {
  auto [it, inserted] =
      relation_index_.try_emplace(label, static_cast<RelationId>(relations_.size()));
  if (inserted) relations_.push_back(label);
  return it->second;
}

GraphBuilder::AddResult GraphBuilder::add(std::string_view head, std::string_view relation,
                                          std::string_view tail) {
  std::string h = normalize_label(head);
  std::string r = normalize_label(relation);
  std::string t = normalize_label(tail);
  if (h.empty() || r.empty() || t.empty()) return AddResult::EmptyField;
  if (h == t) return AddResult::SelfLoop;

  const EntityId hid = intern_entity(h);
  const EntityId tid = intern_entity(t);
  const RelationId rid = intern_relation(r);
  auto& rels = seen_[pair_key(hid, tid)];
  if (std::find(rels.begin(), rels.end(), rid) != rels.end()) return AddResult::Duplicate;
  rels.push_back(rid);
  triples_.push_back({hid, rid, tid});
  return AddResult::Added;
}

KnowledgeGraph GraphBuilder::build() && {
  KnowledgeGraph g;
  g.labels_ = std::move(labels_);
  g.index_ = std::move(index_);
  g.relations_ = std::move(relations_);
  g.triples_ = std::move(triples_);

  const std::size_t n = g.labels_.size();
  std::vector<std::vector<Arc>> arcs(n);
  std::vector<std::vector<TripleId>> out(n);
  for (TripleId t = 0; t < g.triples_.size(); ++t) {
    const Triple& tr = g.triples_[t];
    arcs[tr.head].push_back({tr.tail, t});
    arcs[tr.tail].push_back({tr.head, t});
    out[tr.head].push_back(t);
  }

  g.arc_offsets_.assign(n + 1, 0);
  g.out_offsets_.assign(n + 1, 0);
  g.nbr_offsets_.assign(n + 1, 0);
  std::size_t directed_pairs = 0;
  for (EntityId v = 0; v < n; ++v) {
    auto& list = arcs[v];
    std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) {
      return a.to != b.to ? a.to < b.to : a.triple < b.triple;
    });
    g.arcs_.insert(g.arcs_.end(), list.begin(), list.end());
    g.arc_offsets_[v + 1] = g.arcs_.size();

    g.out_.insert(g.out_.end(), out[v].begin(), out[v].end());
    g.out_offsets_[v + 1] = g.out_.size();

    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i == 0 || list[i].to != list[i - 1].to) g.nbrs_.push_back(list[i].to);
    }
    g.nbr_offsets_[v + 1] = g.nbrs_.size();
    directed_pairs += g.nbr_offsets_[v + 1] - g.nbr_offsets_[v];
  }
  g.edge_count_ = directed_pairs / 2;
  return g;
}

std::vector<int> bfs_hops(const KnowledgeGraph& g, EntityId start, const PathMask* mask) {
  g.check(start);
  std::vector<int> hops(g.entity_count(), kUnreachable);
  if (mask && mask->blocked_node[start]) return hops;
  std::deque<EntityId> queue{start};
  hops[start] = 0;
  while (!queue.empty()) {
    const EntityId v = queue.front();
    queue.pop_front();
    for (const Arc& a : g.arcs(v)) {
      if (hops[a.to] != kUnreachable) continue;
      if (mask && (mask->blocked_node[a.to] || mask->blocked_triple[a.triple])) continue;
      hops[a.to] = hops[v] + 1;
      queue.push_back(a.to);
    }
  }
  return hops;
}

std::optional<std::size_t> hop_distance(const KnowledgeGraph& g, EntityId start, EntityId end) {
  g.check(end);
  const int h = bfs_hops(g, start)[end];
  if (h == kUnreachable) return std::nullopt;
  return static_cast<std::size_t>(h);
}

std::vector<TripleId> shortest_path_ids(const KnowledgeGraph& g, EntityId start, EntityId end,
                                        const PathMask* mask) {
  g.check(start);
  g.check(end);
  if (start == end) return {};
  constexpr TripleId kNone = std::numeric_limits<TripleId>::max();
  std::vector<TripleId> via(g.entity_count(), kNone);
  std::vector<char> seen(g.entity_count(), 0);
  bool blocked = mask && (mask->blocked_node[start] || mask->blocked_node[end]);
  if (!blocked) {
    std::deque<EntityId> queue{start};
    seen[start] = 1;
    while (!queue.empty() && !seen[end]) {
      const EntityId v = queue.front();
      queue.pop_front();
      for (const Arc& a : g.arcs(v)) {
        if (seen[a.to]) continue;
        if (mask && (mask->blocked_node[a.to] || mask->blocked_triple[a.triple])) continue;
        seen[a.to] = 1;
        via[a.to] = a.triple;
        queue.push_back(a.to);
      }
    }
  }
  if (!seen[end]) {
    throw UnreachableError("no path between '" + g.label(start) + "' and '" + g.label(end) + "'");
  }
  std::vector<TripleId> path;
  for (EntityId v = end; v != start;) {
    const TripleId t = via[v];
    path.push_back(t);
    v = g.triple(t).other(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Triple> shortest_path(const KnowledgeGraph& g, EntityId start, EntityId end) {
  std::vector<Triple> out;
  for (TripleId t : shortest_path_ids(g, start, end)) out.push_back(g.triple(t));
  return out;
}

bool connected(const KnowledgeGraph& g, EntityId a, EntityId b, const PathMask* mask) {
  g.check(b);
  return bfs_hops(g, a, mask)[b] != kUnreachable;
}

std::vector<EntityId> path_nodes(const KnowledgeGraph& g, EntityId start,
                                 std::span<const TripleId> path) {
  std::vector<EntityId> nodes{start};
  EntityId at = start;
  for (TripleId t : path) {
    const Triple& tr = g.triple(t);
    if (tr.head != at && tr.tail != at) {
      throw GraphError("triple path does not chain at '" + g.label(at) + "'");
    }
    at = tr.other(at);
    nodes.push_back(at);
  }
  return nodes;
}

}  // namespace kgaug
