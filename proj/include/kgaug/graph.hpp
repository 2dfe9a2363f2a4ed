#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgaug {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using TripleId = std::uint32_t;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnreachableError : public GraphError {
 public:
  using GraphError::GraphError;
};

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  auto operator<=>(const Triple&) const = default;

  EntityId other(EntityId end) const { return end == head ? tail : head; }
};

/// One undirected incidence: following `triple` from the owning entity reaches `to`.
struct Arc {
  EntityId to = 0;
  TripleId triple = 0;
};

/// Immutable after construction; concurrent readers need no synchronization.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  std::size_t entity_count() const { return labels_.size(); }
  std::size_t triple_count() const { return triples_.size(); }
  std::size_t relation_count() const { return relations_.size(); }
  /// Distinct unordered entity pairs joined by at least one triple.
  std::size_t undirected_edge_count() const { return edge_count_; }

  const std::string& label(EntityId id) const { return labels_.at(id); }
  const std::string& relation_label(RelationId id) const { return relations_.at(id); }
  std::optional<EntityId> find(std::string_view label) const;

  std::span<const Triple> triples() const { return triples_; }
  const Triple& triple(TripleId id) const { return triples_.at(id); }

  /// Incident triples in the undirected view, sorted by (neighbor id, triple id).
  std::span<const Arc> arcs(EntityId id) const;
  /// Triples whose head is `id` (directed view), in triple-id order.
  std::span<const TripleId> outgoing(EntityId id) const;
  /// Distinct undirected neighbors, ascending.
  std::span<const EntityId> neighbors(EntityId id) const;
  bool adjacent(EntityId a, EntityId b) const;

  void check(EntityId id) const;

 private:
  friend class GraphBuilder;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, EntityId> index_;
  std::vector<std::string> relations_;
  std::vector<Triple> triples_;

  // CSR layouts
  std::vector<std::size_t> arc_offsets_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_offsets_;
  std::vector<TripleId> out_;
  std::vector<std::size_t> nbr_offsets_;
  std::vector<EntityId> nbrs_;
  std::size_t edge_count_ = 0;
};

class GraphBuilder {
 public:
  enum class AddResult { Added, SelfLoop, Duplicate, EmptyField };

  /// Labels are normalized before interning.
  AddResult add(std::string_view head, std::string_view relation, std::string_view tail);
  EntityId intern_entity(std::string_view label);

  KnowledgeGraph build() &&;

 private:
  RelationId intern_relation(const std::string& label);

  std::vector<std::string> labels_;
  std::unordered_map<std::string, EntityId> index_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, RelationId> relation_index_;
  std::vector<Triple> triples_;
  std::unordered_map<std::uint64_t, std::vector<RelationId>> seen_;
};

/// Removes nodes and/or triples from path search without copying the graph.
struct PathMask {
  std::vector<char> blocked_node;
  std::vector<char> blocked_triple;

  explicit PathMask(const KnowledgeGraph& g)
      : blocked_node(g.entity_count(), 0), blocked_triple(g.triple_count(), 0) {}
};

inline constexpr int kUnreachable = -1;

/// Undirected BFS hop counts from `start`; kUnreachable where no path exists.
std::vector<int> bfs_hops(const KnowledgeGraph& g, EntityId start, const PathMask* mask = nullptr);

std::optional<std::size_t> hop_distance(const KnowledgeGraph& g, EntityId start, EntityId end);

/// Triple ids along one shortest undirected path. Neighbors are expanded in
/// ascending id order and parallel triples in ascending triple id, so the
/// result is deterministic. Throws UnreachableError.
std::vector<TripleId> shortest_path_ids(const KnowledgeGraph& g, EntityId start, EntityId end,
                                        const PathMask* mask = nullptr);

std::vector<Triple> shortest_path(const KnowledgeGraph& g, EntityId start, EntityId end);

bool connected(const KnowledgeGraph& g, EntityId a, EntityId b, const PathMask* mask = nullptr);

/// Entity sequence visited by a triple path that starts at `start`.
std::vector<EntityId> path_nodes(const KnowledgeGraph& g, EntityId start,
                                 std::span<const TripleId> path);

}  // namespace kgaug
