#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgaug/graph.hpp"
#include "kgaug/hierarchy.hpp"

namespace kgaug {

struct IngestIssue {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t triple_rows = 0;
  std::size_t triples_accepted = 0;
  std::size_t self_loops = 0;
  std::size_t duplicate_triples = 0;
  std::size_t malformed_triple_rows = 0;
  std::size_t hierarchy_rows = 0;
  std::size_t hierarchy_accepted = 0;
  std::size_t hierarchy_rejected = 0;
  std::vector<IngestIssue> issues;

  std::size_t rejected() const {
    return self_loops + malformed_triple_rows + hierarchy_rejected;
  }
  /// Human summary followed by a `key=value` block.
  void write(std::ostream& os) const;
};

void read_triples(std::istream& in, const std::string& name, GraphBuilder& builder,
                  IngestReport& report);
void read_hierarchy(std::istream& in, const std::string& name, HierarchyBuilder& builder,
                    IngestReport& report);

struct LoadedGraph {
  KnowledgeGraph graph;
  ClassHierarchy hierarchy;
  IngestReport report;
};

/// Reads `head\trelation\ttail` triples and `child\tparent\tkind` hierarchy
/// rows (kind is `ec` or `cc`). Bad rows are collected in the report; a cyclic
/// hierarchy throws HierarchyError.
LoadedGraph load_graph(const std::filesystem::path& triples_path,
                       const std::filesystem::path& classes_path);

}  // namespace kgaug
