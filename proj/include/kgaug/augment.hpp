#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgaug/graph.hpp"
#include "kgaug/hierarchy.hpp"

namespace kgaug {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";

enum class SampleKind { Positive, Negative };

class NoCandidateError : public GraphError {
 public:
  using GraphError::GraphError;
};

struct PathSegment {
  std::vector<TripleId> triples;
  EntityId end_node = 0;
  bool separator_follows = false;
};

struct SampleRecord {
  EntityId anchor = 0;
  SampleKind kind = SampleKind::Positive;
  std::optional<std::size_t> level;  // negatives only
  std::vector<PathSegment> segments;
  std::vector<std::string> tokens;
  std::vector<int> position_index;  // parallel to tokens
  std::size_t paths_merged = 0;
  bool truncated = false;
};

struct AugmentConfig {
  std::size_t K = 2;   // neighbor triples per positive
  std::size_t k = 3;   // negative levels
  std::size_t L = 64;  // target negative length in tokens
  bool same_class_preference = true;
  std::uint64_t seed = 42;
  // Level-n negatives end at hop n + negative_hop_offset; positives at positive_hop.
  std::size_t positive_hop = 1;
  std::size_t negative_hop_offset = 1;

  std::size_t negative_hop(std::size_t level) const { return level + negative_hop_offset; }
};

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Warning;
  std::string message;
};

bool has_errors(std::span<const Diagnostic> diags);

/// Structural checks plus the hop-ordering sanity rule: negatives that sit
/// at or inside the positive hop radius are flagged as degraded setups.
std::vector<Diagnostic> validate_level_config(const AugmentConfig& cfg);

/// Serializes segments: `[CLS]` (index 0), then head/relation/tail tokens of
/// each triple sharing one index that starts at 1 and grows per triple.
/// `[SEP]` carries the index of the triple after it.
void serialize(const KnowledgeGraph& g, SampleRecord& record);

struct AnchorFailure {
  EntityId anchor = 0;
  std::optional<std::size_t> level;
  std::string reason;
};

struct AugmentOutput {
  std::vector<SampleRecord> records;
  std::vector<AnchorFailure> failures;
};

class Augmenter {
 public:
  Augmenter(const KnowledgeGraph& g, const ClassHierarchy& hierarchy, AugmentConfig cfg);

  const AugmentConfig& config() const { return cfg_; }
  std::optional<NodeId> class_of(EntityId e) const { return classes_.at(e); }

  SampleRecord positive(EntityId anchor) const;
  /// Negative construction loop; throws NoCandidateError when nothing sits at
  /// the level's hop distance.
  SampleRecord negative(EntityId anchor, std::size_t level, std::size_t length,
                        std::uint64_t seed) const;
  std::uint64_t negative_seed(EntityId anchor, std::size_t level) const;

  /// One positive and up to k negatives per anchor, merged in anchor order.
  /// Anchors are processed with OpenMP; the output equals all_serial().
  AugmentOutput all(std::span<const EntityId> anchors) const;
  AugmentOutput all_serial(std::span<const EntityId> anchors) const;

 private:
  AugmentOutput for_anchor(EntityId anchor) const;

  const KnowledgeGraph& g_;
  AugmentConfig cfg_;
  std::vector<std::optional<NodeId>> classes_;
};

SampleRecord build_positive(const KnowledgeGraph& g, EntityId anchor, const AugmentConfig& cfg);
SampleRecord build_negative(const KnowledgeGraph& g, const ClassHierarchy& hierarchy,
                            EntityId anchor, std::size_t level, std::size_t length,
                            std::uint64_t seed, const AugmentConfig& cfg = {});
AugmentOutput build_all(const KnowledgeGraph& g, const ClassHierarchy& hierarchy,
                        const AugmentConfig& cfg, std::span<const EntityId> anchors);

}  // namespace kgaug
