#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgaug/graph.hpp"

namespace kgaug {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Entity, Class };

class HierarchyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entity and class nodes joined by hyponymy (child -> parent) edges.
/// Each node has at most one parent, so the structure is a forest.
class ClassHierarchy {
 public:
  static constexpr std::string_view kRootLabel = "root";

  std::size_t node_count() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::string& label(NodeId n) const { return labels_.at(n); }
  NodeKind kind(NodeId n) const { return kinds_.at(n); }
  std::optional<NodeId> parent(NodeId n) const;
  std::optional<NodeId> find(std::string_view label) const;

  /// (child, parent) pairs in insertion order.
  std::span<const std::pair<NodeId, NodeId>> hyponymy() const { return edges_; }

  /// Class node of an entity label, if the entity has an `ec` assignment.
  std::optional<NodeId> class_of(std::string_view entity_label) const;
  std::vector<NodeId> ancestors(NodeId n) const;
  /// Longest root-to-leaf chain measured in edges.
  std::size_t depth() const;
  std::vector<NodeId> roots() const;

  /// Class node per knowledge-graph entity; nullopt where unassigned.
  std::vector<std::optional<NodeId>> resolve_classes(const KnowledgeGraph& g) const;

 private:
  friend class HierarchyBuilder;

  std::vector<std::string> labels_;
  std::vector<NodeKind> kinds_;
  std::vector<std::optional<NodeId>> parent_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

class HierarchyBuilder {
 public:
  enum class AddResult { Added, Duplicate, KindConflict, SecondParent, EmptyField };

  /// `entity_class` selects an ec row (entity -> class) versus a cc row.
  AddResult add(std::string_view child, std::string_view parent, bool entity_class);

  /// Throws HierarchyError naming one offending edge when the parent links
  /// contain a cycle, or when a root node exists and some other tree is not
  /// attached to it.
  ClassHierarchy build() &&;

 private:
  NodeId intern(const std::string& label, NodeKind kind, bool& conflict);

  ClassHierarchy h_;
};

}  // namespace kgaug
