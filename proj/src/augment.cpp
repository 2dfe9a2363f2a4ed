#include "kgaug/augment.hpp"

#include <algorithm>
#include <random>

#include "kgaug/rng.hpp"
#include "kgaug/text.hpp"

namespace kgaug {

bool has_errors(std::span<const Diagnostic> diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

std::vector<Diagnostic> validate_level_config(const AugmentConfig& cfg) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) {
    out.push_back({Diagnostic::Severity::Error, std::move(msg)});
  };
  if (cfg.K == 0) error("K must be at least 1");
  if (cfg.k == 0) error("k (negative levels) must be at least 1");
  if (cfg.positive_hop == 0) error("positive_hop must be at least 1");
  // [CLS] plus one token per head/relation/tail along a level-1 path
  const std::size_t min_len = 1 + 3 * cfg.negative_hop(1);
  if (cfg.L < min_len) {
    error("L=" + std::to_string(cfg.L) + " is shorter than the smallest level-1 sample (" +
          std::to_string(min_len) + " tokens)");
  }
  if (has_errors(out)) return out;

  const std::size_t pos = cfg.positive_hop;
  const std::size_t neg_lo = cfg.negative_hop(1);
  const std::size_t neg_hi = cfg.negative_hop(cfg.k);
  if (neg_hi <= pos) {
    out.push_back({Diagnostic::Severity::Warning,
                   "negatives (hop " + std::to_string(neg_lo) + ".." + std::to_string(neg_hi) +
                       ") are all at or inside the positive hop " + std::to_string(pos) +
                       " (situation S2: performance degrades sharply when negatives are "
                       "closer than positives)"});
  } else if (neg_lo <= pos) {
    out.push_back({Diagnostic::Severity::Warning,
                   "negatives (hop " + std::to_string(neg_lo) + ".." + std::to_string(neg_hi) +
                       ") overlap the positive hop " + std::to_string(pos) +
                       " (situation S3: the same hop is used for positives and negatives)"});
  }
  return out;
}

void serialize(const KnowledgeGraph& g, SampleRecord& record) {
  record.tokens.assign(1, std::string(kClsToken));
  record.position_index.assign(1, 0);
  int index = 1;
  for (const PathSegment& seg : record.segments) {
    for (TripleId t : seg.triples) {
      const Triple& tr = g.triple(t);
      for (const std::string* label :
           {&g.label(tr.head), &g.relation_label(tr.relation), &g.label(tr.tail)}) {
        for (auto& tok : tokenize(*label)) {
          record.tokens.push_back(std::move(tok));
          record.position_index.push_back(index);
        }
      }
      ++index;
    }
    if (seg.separator_follows) {
      record.tokens.emplace_back(kSepToken);
      record.position_index.push_back(index);
    }
  }
  record.paths_merged = record.segments.size();
}

Augmenter::Augmenter(const KnowledgeGraph& g, const ClassHierarchy& hierarchy, AugmentConfig cfg)
    : g_(g), cfg_(cfg), classes_(hierarchy.resolve_classes(g)) {}

SampleRecord Augmenter::positive(EntityId anchor) const {
  g_.check(anchor);
  if (cfg_.K == 0) throw std::invalid_argument("K must be at least 1");
  auto arcs = g_.arcs(anchor);
  if (arcs.empty()) {
    throw NoCandidateError("entity '" + g_.label(anchor) + "' is isolated; no positive sample");
  }
  SampleRecord rec;
  rec.anchor = anchor;
  rec.kind = SampleKind::Positive;
  if (cfg_.positive_hop == 1) {
    // arcs are already ordered by (neighbor id, triple id)
    for (std::size_t i = 0; i < std::min(cfg_.K, arcs.size()); ++i) {
      rec.segments.push_back({{arcs[i].triple}, arcs[i].to, false});
    }
  } else {
    const auto hops = bfs_hops(g_, anchor);
    for (EntityId e = 0; e < hops.size() && rec.segments.size() < cfg_.K; ++e) {
      if (hops[e] != static_cast<int>(cfg_.positive_hop)) continue;
      rec.segments.push_back({shortest_path_ids(g_, anchor, e), e, false});
    }
    if (rec.segments.empty()) {
      throw NoCandidateError("entity '" + g_.label(anchor) + "' has nothing at hop " +
                             std::to_string(cfg_.positive_hop));
    }
  }
  serialize(g_, rec);
  return rec;
}

std::uint64_t Augmenter::negative_seed(EntityId anchor, std::size_t level) const {
  return derive_seed(cfg_.seed, anchor, level);
}

SampleRecord Augmenter::negative(EntityId anchor, std::size_t level, std::size_t length,
                                 std::uint64_t seed) const {
  g_.check(anchor);
  if (level == 0) throw std::invalid_argument("negative level must be at least 1");
  const int target = static_cast<int>(cfg_.negative_hop(level));
  const auto hops = bfs_hops(g_, anchor);

  std::vector<EntityId> ring;
  std::vector<EntityId> same_class;
  const auto anchor_class = classes_[anchor];
  for (EntityId e = 0; e < hops.size(); ++e) {
    if (hops[e] != target) continue;
    ring.push_back(e);
    if (anchor_class && classes_[e] == anchor_class) same_class.push_back(e);
  }
  if (ring.empty()) {
    throw NoCandidateError("no entity at hop " + std::to_string(target) + " from '" +
                           g_.label(anchor) + "'");
  }
  // the same-class set never shrinks on the full graph, so once non-empty it
  // is the only pool
  std::vector<EntityId> pool =
      cfg_.same_class_preference && !same_class.empty() ? same_class : ring;

  SampleRecord rec;
  rec.anchor = anchor;
  rec.kind = SampleKind::Negative;
  rec.level = level;
  serialize(g_, rec);

  PathMask used(g_);  // triples already placed in this record
  Rng rng(seed);
  while (rec.tokens.size() < length && !pool.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const std::size_t slot = pick(rng);
    const EntityId end = pool[slot];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(slot));

    std::vector<TripleId> first;
    try {
      first = shortest_path_ids(g_, anchor, end, &used);
    } catch (const UnreachableError&) {
      continue;  // every route to this end reuses a placed triple
    }
    for (TripleId t : first) used.blocked_triple[t] = 1;

    PathMask residual = used;
    const auto interior = path_nodes(g_, anchor, first);
    for (std::size_t i = 1; i + 1 < interior.size(); ++i) residual.blocked_node[interior[i]] = 1;

    if (!rec.segments.empty()) rec.segments.back().separator_follows = true;
    rec.segments.push_back({std::move(first), end, false});
    if (connected(g_, anchor, end, &residual)) {
      auto second = shortest_path_ids(g_, anchor, end, &residual);
      for (TripleId t : second) used.blocked_triple[t] = 1;
      rec.segments.back().separator_follows = true;
      rec.segments.push_back({std::move(second), end, false});
    }
    serialize(g_, rec);
  }
  rec.truncated = rec.tokens.size() < length;
  return rec;
}

AugmentOutput Augmenter::for_anchor(EntityId anchor) const {
  AugmentOutput out;
  try {
    out.records.push_back(positive(anchor));
  } catch (const std::exception& e) {
    out.failures.push_back({anchor, std::nullopt, e.what()});
  }
  for (std::size_t level = 1; level <= cfg_.k; ++level) {
    try {
      out.records.push_back(negative(anchor, level, cfg_.L, negative_seed(anchor, level)));
    } catch (const NoCandidateError& e) {
      out.failures.push_back({anchor, level, e.what()});
    }
  }
  return out;
}

AugmentOutput Augmenter::all_serial(std::span<const EntityId> anchors) const {
  AugmentOutput out;
  for (EntityId a : anchors) {
    g_.check(a);
    AugmentOutput part = for_anchor(a);
    std::move(part.records.begin(), part.records.end(), std::back_inserter(out.records));
    std::move(part.failures.begin(), part.failures.end(), std::back_inserter(out.failures));
  }
  return out;
}

AugmentOutput Augmenter::all(std::span<const EntityId> anchors) const {
  for (EntityId a : anchors) g_.check(a);
  std::vector<AugmentOutput> parts(anchors.size());
  const auto count = static_cast<std::ptrdiff_t>(anchors.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    parts[idx] = for_anchor(anchors[idx]);
  }
  AugmentOutput out;
  for (auto& part : parts) {
    std::move(part.records.begin(), part.records.end(), std::back_inserter(out.records));
    std::move(part.failures.begin(), part.failures.end(), std::back_inserter(out.failures));
  }
  return out;
}

SampleRecord build_positive(const KnowledgeGraph& g, EntityId anchor, const AugmentConfig& cfg) {
  static const ClassHierarchy kNoClasses;
  return Augmenter(g, kNoClasses, cfg).positive(anchor);
}

SampleRecord build_negative(const KnowledgeGraph& g, const ClassHierarchy& hierarchy,
                            EntityId anchor, std::size_t level, std::size_t length,
                            std::uint64_t seed, const AugmentConfig& cfg) {
  return Augmenter(g, hierarchy, cfg).negative(anchor, level, length, seed);
}

AugmentOutput build_all(const KnowledgeGraph& g, const ClassHierarchy& hierarchy,
                        const AugmentConfig& cfg, std::span<const EntityId> anchors) {
  return Augmenter(g, hierarchy, cfg).all(anchors);
}

}  // namespace kgaug
