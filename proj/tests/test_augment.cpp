#include <doctest.h>

#include <set>
#include <sstream>

#include "kgaug/augment.hpp"
#include "kgaug/sample_io.hpp"
#include "oracles.hpp"

using namespace kgaug;

namespace {

ClassHierarchy no_classes() { return HierarchyBuilder{}.build(); }

// Round-robin classes c0..c{k-1} over v0..v{n-1}.
ClassHierarchy round_robin_classes(std::size_t n, std::size_t k) {
  HierarchyBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add(oracle::node_name(i), "c" + std::to_string(i % k), true);
  return std::move(b).build();
}

std::vector<EntityId> all_anchors(const KnowledgeGraph& g) {
  std::vector<EntityId> out(g.entity_count());
  for (EntityId e = 0; e < out.size(); ++e) out[e] = e;
  return out;
}

bool same_records(const std::vector<SampleRecord>& a, const std::vector<SampleRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].anchor != b[i].anchor || a[i].level != b[i].level || a[i].tokens != b[i].tokens ||
        a[i].position_index != b[i].position_index || a[i].truncated != b[i].truncated) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("positive on a star keeps the first K triples") {
  const auto star = oracle::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  AugmentConfig cfg;
  cfg.K = 2;
  const auto rec = build_positive(star, 0, cfg);
  CHECK(rec.tokens == std::vector<std::string>{"[CLS]", "v0", "r", "v1", "v0", "r", "v2"});
  CHECK(rec.position_index == std::vector<int>{0, 1, 1, 1, 2, 2, 2});
  CHECK(rec.paths_merged == 2);
  CHECK(rec.kind == SampleKind::Positive);
  CHECK_FALSE(rec.level.has_value());
}

TEST_CASE("positive with K=1 on a single edge is that triple") {
  const auto edge = oracle::from_edges(2, {{0, 1}});
  AugmentConfig cfg;
  cfg.K = 1;
  const auto rec = build_positive(edge, 1, cfg);
  REQUIRE(rec.segments.size() == 1);
  CHECK(rec.segments[0].triples == std::vector<TripleId>{0});
  CHECK(rec.position_index == std::vector<int>{0, 1, 1, 1});
}

TEST_CASE("multi-token labels share their triple's position") {
  GraphBuilder b;
  b.add("type 2 diabetes", "treated by", "metformin");
  const auto g = std::move(b).build();
  const auto rec = build_positive(g, 0, AugmentConfig{});
  CHECK(rec.tokens.size() == 7);
  CHECK(rec.position_index == std::vector<int>{0, 1, 1, 1, 1, 1, 1});
}

TEST_CASE("negative on a chain keeps a single segment") {
  const auto chain = oracle::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto rec = build_negative(chain, no_classes(), 0, 1, 64, 42);
  REQUIRE(rec.segments.size() == 1);
  CHECK(rec.segments[0].end_node == 2);
  CHECK(path_nodes(chain, 0, rec.segments[0].triples) == std::vector<EntityId>{0, 1, 2});
  CHECK(rec.truncated);
  CHECK(rec.paths_merged == 1);
}

TEST_CASE("negative on a 4-cycle appends the disjoint second path") {
  const auto square = oracle::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto rec = build_negative(square, no_classes(), 0, 1, 64, 42);
  REQUIRE(rec.segments.size() == 2);
  CHECK(path_nodes(square, 0, rec.segments[0].triples) == std::vector<EntityId>{0, 1, 2});
  CHECK(path_nodes(square, 0, rec.segments[1].triples) == std::vector<EntityId>{0, 3, 2});
  const std::vector<std::string> expect{"[CLS]", "v0", "r", "v1", "v1", "r", "v2", "[SEP]",
                                        "v3",    "r",  "v0", "v2", "r",  "v3"};
  CHECK(rec.tokens == expect);
  CHECK(rec.position_index == std::vector<int>{0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4});
}

TEST_CASE("separators sit between segments only") {
  const auto g = oracle::random_graph(25, 0.15, 4);
  Augmenter aug(g, no_classes(), AugmentConfig{});
  for (EntityId a = 0; a < g.entity_count(); ++a) {
    try {
      const auto rec = aug.negative(a, 1, 64, aug.negative_seed(a, 1));
      const auto seps = std::count(rec.tokens.begin(), rec.tokens.end(), std::string(kSepToken));
      CHECK(static_cast<std::size_t>(seps) + 1 == rec.segments.size());
      CHECK(rec.tokens.back() != kSepToken);
      CHECK(rec.tokens.front() == kClsToken);
      CHECK(rec.position_index.size() == rec.tokens.size());
    } catch (const NoCandidateError&) {
    }
  }
}

TEST_CASE("a two-node component has a positive and no negatives") {
  const auto g = oracle::from_edges(2, {{0, 1}});
  const auto out = build_all(g, no_classes(), AugmentConfig{}, std::vector<EntityId>{0});
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].kind == SampleKind::Positive);
  CHECK(out.failures.size() == 3);
  CHECK_THROWS_AS(build_negative(g, no_classes(), 0, 1, 64, 1), NoCandidateError);
}

TEST_CASE("negatives reach exactly hop level+1 and second paths are disjoint") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = oracle::random_graph(30, 0.08, 500 + seed, 0.1);
    const auto d = oracle::all_pairs_hops(g);
    const auto classes = round_robin_classes(30, 3);
    const auto out = build_all(g, classes, AugmentConfig{}, all_anchors(g));
    for (const auto& rec : out.records) {
      if (rec.kind == SampleKind::Positive) continue;
      for (std::size_t s = 0; s < rec.segments.size(); ++s) {
        const auto& seg = rec.segments[s];
        CHECK(d[rec.anchor][seg.end_node] == static_cast<int>(*rec.level + 1));
        const auto nodes = path_nodes(g, rec.anchor, seg.triples);
        CHECK(nodes.back() == seg.end_node);
        if (s > 0 && rec.segments[s - 1].end_node == seg.end_node) {
          const auto prev = path_nodes(g, rec.anchor, rec.segments[s - 1].triples);
          const std::set<EntityId> inner(prev.begin() + 1, prev.end() - 1);
          for (std::size_t i = 1; i + 1 < nodes.size(); ++i) CHECK(inner.count(nodes[i]) == 0);
        }
      }
    }
  }
}

TEST_CASE("same-class preference picks same-class ends when they exist") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = oracle::random_graph(30, 0.1, 900 + seed);
    const auto d = oracle::all_pairs_hops(g);
    const auto classes = round_robin_classes(30, 4);
    const auto out = build_all(g, classes, AugmentConfig{}, all_anchors(g));
    for (const auto& rec : out.records) {
      if (rec.kind == SampleKind::Positive) continue;
      const int hop = static_cast<int>(*rec.level + 1);
      bool exists = false;
      for (EntityId e = 0; e < 30; ++e) exists = exists || (d[rec.anchor][e] == hop && e % 4 == rec.anchor % 4);
      if (!exists) continue;
      for (const auto& seg : rec.segments) CHECK(seg.end_node % 4 == rec.anchor % 4);
    }
  }
}

TEST_CASE("parallel construction equals the serial reference") {
  const auto g = oracle::random_graph(80, 0.05, 3, 0.2);
  const auto classes = round_robin_classes(80, 5);
  Augmenter aug(g, classes, AugmentConfig{});
  const auto anchors = all_anchors(g);
  const auto par = aug.all(anchors), ser = aug.all_serial(anchors);
  CHECK(same_records(par.records, ser.records));
  CHECK(par.failures.size() == ser.failures.size());
  CHECK(same_records(aug.all(anchors).records, par.records));
}

TEST_CASE("negatives stop once the length target is met") {
  const auto g = oracle::random_graph(40, 0.2, 12);
  Augmenter aug(g, no_classes(), AugmentConfig{});
  const auto rec = aug.negative(0, 1, 16, 7);
  if (!rec.truncated) CHECK(rec.tokens.size() >= 16);
  const auto longer = aug.negative(0, 1, 10000, 7);
  CHECK(longer.truncated);
}

TEST_CASE("level configuration sanity") {
  CHECK(validate_level_config(AugmentConfig{}).empty());
  CHECK(AugmentConfig{}.k == 3);

  AugmentConfig s2;
  s2.k = 1;
  s2.negative_hop_offset = 0;  // negatives at hop 1, positives at hop 1
  auto d = validate_level_config(s2);
  REQUIRE(d.size() == 1);
  CHECK(d[0].severity == Diagnostic::Severity::Warning);
  CHECK(d[0].message.find("S2") != std::string::npos);

  AugmentConfig s3;
  s3.negative_hop_offset = 0;  // negatives at hops 1..3
  d = validate_level_config(s3);
  REQUIRE(d.size() == 1);
  CHECK(d[0].message.find("S3") != std::string::npos);

  AugmentConfig bad;
  bad.k = 0;
  CHECK(has_errors(validate_level_config(bad)));
  bad = {};
  bad.L = 3;
  CHECK(has_errors(validate_level_config(bad)));
}

TEST_CASE("JSONL round trip") {
  const auto square = oracle::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto out = build_all(square, no_classes(), AugmentConfig{}, all_anchors(square));
  std::ostringstream os;
  write_jsonl(os, square, out.records);
  std::istringstream in(os.str());
  const auto lines = read_jsonl(in);
  REQUIRE(lines.size() == out.records.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    CHECK(lines[i].anchor == square.label(out.records[i].anchor));
    CHECK(lines[i].kind == out.records[i].kind);
    CHECK(lines[i].level == out.records[i].level);
    CHECK(lines[i].tokens == out.records[i].tokens);
    CHECK(lines[i].position_index == out.records[i].position_index);
    CHECK(lines[i].truncated == out.records[i].truncated);
  }
  CHECK(to_json_line(square, out.records[0]).rfind("{\"anchor\":\"v0\",\"kind\":\"positive\"", 0) == 0);
}
