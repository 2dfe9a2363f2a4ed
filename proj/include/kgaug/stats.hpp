#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kgaug/graph.hpp"

namespace kgaug {

/// A maximal biconnected subgraph. Isolated vertices form single-node blocks
/// with no edges.
struct Block {
  std::vector<EntityId> nodes;                          // ascending
  std::vector<std::pair<EntityId, EntityId>> edges;     // (lo, hi)
};

/// Hopcroft-Tarjan on the simple undirected view, driven by an explicit stack.
std::vector<Block> biconnected_components(const KnowledgeGraph& g);
std::vector<EntityId> articulation_points(const KnowledgeGraph& g);

/// Nodes of the largest block over all nodes.
double max_pbc_ratio(const KnowledgeGraph& g);

/// Greedy longest-match entity spotting over a token stream. A label matches
/// at a position when all of its tokens match there, or when a prefix longer
/// than `match_threshold` tokens does.
class EntityMatcher {
 public:
  EntityMatcher(const KnowledgeGraph& g, std::size_t match_threshold);

  /// Covered-token flags, one per corpus token.
  std::vector<char> cover(std::span<const std::string> tokens) const;

 private:
  std::size_t threshold_;
  std::vector<std::vector<std::string>> labels_;
  // first token -> label indices
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

double coverage_ratio(std::span<const std::string> corpus_tokens, const KnowledgeGraph& g,
                      std::size_t match_threshold);

struct DensityConfig {
  std::size_t samples = 100;
  double node_fraction = 0.10;
  std::uint64_t seed = 42;
};

/// |E| / (|V|(|V|-1)) with each undirected edge counted once.
double induced_density(const KnowledgeGraph& g, std::span<const EntityId> nodes);

/// ceil(node_fraction * N), never below 2. Throws GraphError when N < 2.
std::size_t density_sample_size(const KnowledgeGraph& g, const DensityConfig& cfg);
/// Node subset for sample `index`, drawn without replacement from a stream
/// derived from (seed, index).
std::vector<EntityId> density_sample(const KnowledgeGraph& g, const DensityConfig& cfg,
                                     std::size_t index);

/// OpenMP over samples; bit-identical to subgraph_density_serial.
double subgraph_density(const KnowledgeGraph& g, const DensityConfig& cfg);
double subgraph_density_serial(const KnowledgeGraph& g, const DensityConfig& cfg);

struct IndicatorReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::optional<double> coverage_ratio;  // absent without a corpus
  double max_pbc_ratio = 0.0;
  double subgraph_density = 0.0;

  void write_key_values(std::ostream& os) const;
  nlohmann::json to_json() const;
};

struct StatsConfig {
  DensityConfig density;
  std::size_t match_threshold = 1;
};

IndicatorReport indicator_report(const KnowledgeGraph& g,
                                 std::optional<std::span<const std::string>> corpus_tokens,
                                 const StatsConfig& cfg);

}  // namespace kgaug
