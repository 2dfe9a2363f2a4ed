#include "kgaug/hierarchy.hpp"

#include <algorithm>

#include "kgaug/text.hpp"

namespace kgaug {

std::optional<NodeId> ClassHierarchy::parent(NodeId n) const { return parent_.at(n); }

std::optional<NodeId> ClassHierarchy::find(std::string_view label) const {
  auto it = index_.find(normalize_label(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> ClassHierarchy::class_of(std::string_view entity_label) const {
  auto n = find(entity_label);
  if (!n || kinds_[*n] != NodeKind::Entity) return std::nullopt;
  return parent_[*n];
}

std::vector<NodeId> ClassHierarchy::ancestors(NodeId n) const {
  std::vector<NodeId> out;
  for (auto p = parent_.at(n); p; p = parent_[*p]) out.push_back(*p);
  return out;
}

std::size_t ClassHierarchy::depth() const {
  std::size_t best = 0;
  for (NodeId n = 0; n < labels_.size(); ++n) best = std::max(best, ancestors(n).size());
  return best;
}

std::vector<NodeId> ClassHierarchy::roots() const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < labels_.size(); ++n) {
    if (!parent_[n]) out.push_back(n);
  }
  return out;
}

std::vector<std::optional<NodeId>> ClassHierarchy::resolve_classes(const KnowledgeGraph& g) const {
  std::vector<std::optional<NodeId>> out(g.entity_count());
  for (EntityId e = 0; e < g.entity_count(); ++e) {
    auto it = index_.find(g.label(e));
    if (it != index_.end() && kinds_[it->second] == NodeKind::Entity) {
      out[e] = parent_[it->second];
    }
  }
  return out;
}

NodeId HierarchyBuilder::intern(const std::string& label, NodeKind kind, bool& conflict) {
  auto [it, inserted] = h_.index_.try_emplace(label, static_cast<NodeId>(h_.labels_.size()));
  if (inserted) {
    h_.labels_.push_back(label);
    h_.kinds_.push_back(kind);
    h_.parent_.emplace_back();
  } else if (h_.kinds_[it->second] != kind) {
    conflict = true;
  }
  return it->second;
}

HierarchyBuilder::AddResult HierarchyBuilder::add(std::string_view child, std::string_view parent,
                                                  bool entity_class) {
  const std::string c = normalize_label(child);
  const std::string p = normalize_label(parent);
  if (c.empty() || p.empty()) return AddResult::EmptyField;

  // check kinds before interning so a rejected row leaves no trace
  auto kind_ok = [&](const std::string& label, NodeKind want) {
    auto it = h_.index_.find(label);
    return it == h_.index_.end() || h_.kinds_[it->second] == want;
  };
  const NodeKind child_kind = entity_class ? NodeKind::Entity : NodeKind::Class;
  if (!kind_ok(c, child_kind) || !kind_ok(p, NodeKind::Class)) return AddResult::KindConflict;

  if (auto it = h_.index_.find(c); it != h_.index_.end() && h_.parent_[it->second]) {
    const NodeId existing = *h_.parent_[it->second];
    return h_.labels_[existing] == p ? AddResult::Duplicate : AddResult::SecondParent;
  }

  bool conflict = false;
  const NodeId cn = intern(c, child_kind, conflict);
  const NodeId pn = intern(p, NodeKind::Class, conflict);
  h_.parent_[cn] = pn;
  h_.edges_.emplace_back(cn, pn);
  return AddResult::Added;
}

ClassHierarchy HierarchyBuilder::build() && {
  const std::size_t n = h_.labels_.size();
  // 0 = unvisited, 1 = on current chain, 2 = known acyclic
  std::vector<char> state(n, 0);
  for (NodeId start = 0; start < n; ++start) {
    std::vector<NodeId> chain;
    NodeId v = start;
    while (state[v] == 0) {
      state[v] = 1;
      chain.push_back(v);
      if (!h_.parent_[v]) break;
      const NodeId p = *h_.parent_[v];
      if (state[p] == 1) {
        throw HierarchyError("hyponymy cycle through edge '" + h_.labels_[v] + "' -> '" +
                             h_.labels_[p] + "'");
      }
      v = p;
    }
    for (NodeId c : chain) state[c] = 2;
  }

  if (auto root = h_.index_.find(std::string(ClassHierarchy::kRootLabel));
      root != h_.index_.end()) {
    for (NodeId v = 0; v < n; ++v) {
      if (v != root->second && !h_.parent_[v]) {
        throw HierarchyError("node '" + h_.labels_[v] + "' is not attached to '" +
                             std::string(ClassHierarchy::kRootLabel) + "'");
      }
    }
  }
  return std::move(h_);
}

}  // namespace kgaug
