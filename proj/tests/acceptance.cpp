// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "kgaug/augment.hpp"
#include "kgaug/fuse_check.hpp"
#include "kgaug/ingest.hpp"
#include "kgaug/pipeline.hpp"
#include "kgaug/poincare.hpp"
#include "kgaug/stats.hpp"
#include "oracles.hpp"

using namespace kgaug;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (passed) detail << "first failure: " << what << "; ";
      passed = false;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<oracle::BruteBlock> library_blocks(const KnowledgeGraph& g) {
  std::vector<oracle::BruteBlock> out;
  for (const auto& b : biconnected_components(g)) {
    oracle::BruteBlock bb{b.nodes, b.edges};
    std::sort(bb.nodes.begin(), bb.nodes.end());
    std::sort(bb.edges.begin(), bb.edges.end());
    out.push_back(std::move(bb));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void block_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  std::size_t blocks = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 12;
    const auto g = oracle::random_graph(n, 0.3, 7000 + seed);
    const auto expect = oracle::brute_force_blocks(g);
    blocks += expect.size();
    o.require(library_blocks(g) == expect, "block mismatch on graph seed " + std::to_string(seed));
  }
  const double k3 = max_pbc_ratio(oracle::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}));
  const double path = max_pbc_ratio(oracle::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}));
  o.require(k3 == 1.0, "K3 ratio");
  o.require(path == 0.5, "path ratio");
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime");
  o.detail << "200 graphs, " << blocks << " blocks, K3=" << k3 << ", P4=" << path << ", "
           << secs << " s";
}

void indicators(Outcome& o) {
  PipelineConfig cfg;
  cfg.kg = KGAUG_DATA_DIR "/medical_kg.tsv";
  cfg.classes = KGAUG_DATA_DIR "/medical_classes.tsv";
  cfg.corpus = KGAUG_DATA_DIR "/medical_corpus.txt";
  cfg.out_dir = fs::temp_directory_path() / "kgaug_accept_stats";
  std::ostringstream out, err;
  o.require(run(Subcommand::Stats, cfg, {}, out, err) == 0, "stats exit status");
  const std::string text = out.str();
  std::map<std::string, std::string> kv;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"nodes", "edges", "coverage_ratio", "max_pbc_ratio", "subgraph_density"}) {
    o.require(kv.count(key) == 1 && kv[key] != "na", std::string("indicator ") + key);
  }

  // Hand count over data/medical_corpus.txt (49 tokens): influenza fever cough;
  // oseltamivir nausea; chest pain + coronary heart disease; type 2 diabetes
  // metformin insulin; the two-token prefix "shortness of"; heart twice.
  const double hand = 19.0 / 49.0;
  const auto loaded = load_graph(cfg.kg, cfg.classes);
  const double coverage = coverage_ratio(read_corpus(cfg.corpus), loaded.graph, 1);
  o.require(coverage == hand, "coverage differs from hand count");

  DensityConfig dc;
  const double d1 = subgraph_density(loaded.graph, dc), d2 = subgraph_density(loaded.graph, dc);
  o.require(d1 == d2, "density not deterministic");
  o.require(d1 >= 0.0 && d1 <= 0.5, "density out of range");
  dc.seed = 7;
  const double d3 = subgraph_density(loaded.graph, dc);
  o.require(d3 == subgraph_density(loaded.graph, dc), "density not deterministic (seed 7)");
  o.detail << "nodes=" << kv["nodes"] << " edges=" << kv["edges"] << " coverage=" << coverage
           << " (hand 19/49) max_pbc=" << kv["max_pbc_ratio"] << " density(42)=" << d1
           << " density(7)=" << d3;
}

ClassHierarchy reconstruction_tree() { return oracle::balanced_tree(3, 3); }

TrainConfig reconstruction_config() {
  TrainConfig cfg;
  cfg.dim = 10;
  return cfg;
}

void poincare_distance_checks(Outcome& o) {
  Vector origin = Vector::Zero(4), x = Vector::Zero(4);
  x(0) = 0.5;
  const double err = std::abs(poincare_distance(origin, x) - std::log(3.0));
  o.require(err < 1e-9, "ln 3");

  std::mt19937_64 rng(314);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.0, 0.999);
  auto sample = [&] {
    Vector v(8);
    for (auto& c : v) c = normal(rng);
    return Vector(v.normalized() * radius(rng));
  };
  for (int i = 0; i < 1000; ++i) {
    const Vector u = sample(), v = sample();
    o.require(poincare_distance(u, v) == poincare_distance(v, u), "symmetry");
    o.require(poincare_distance(u, u) == 0.0, "identity");
    o.require(poincare_distance(u, v) > 0.0, "positivity");
  }

  TrainLog log;
  train(reconstruction_tree(), reconstruction_config(), &log);
  o.require(log.max_norm_seen <= 1.0 - 1e-5, "norm bound");
  // a huge step size pushes vectors against the boundary on most steps
  TrainConfig harsh = reconstruction_config();
  harsh.lr = 500.0;
  harsh.epochs = 50;
  TrainLog harsh_log;
  const auto pushed = train(reconstruction_tree(), harsh, &harsh_log);
  o.require(harsh_log.max_norm_seen <= 1.0 - 1e-5, "norm bound (lr 500)");
  o.require(pushed.data().allFinite(), "finite after lr 500");
  o.detail << "|d-ln3|=" << err << ", 1000 pairs, max norm over all steps=" << std::setprecision(10)
           << log.max_norm_seen << " (lr 500: " << harsh_log.max_norm_seen << ")";
}

void reconstruction(Outcome& o) {
  const auto t0 = Clock::now();
  const auto tree = reconstruction_tree();
  const auto model = train(tree, reconstruction_config());
  const auto m = evaluate_reconstruction(model, tree, 50, 2024);
  const double secs = seconds_since(t0);
  o.require(tree.node_count() == 40, "tree size");
  o.require(m.mean_rank <= 5.0, "mean rank");
  o.require(m.closer_rate >= 0.90, "closer rate");
  o.require(secs < 120.0, "runtime");
  o.detail << m.pairs << " pairs, mean rank=" << m.mean_rank << ", closer rate=" << m.closer_rate
           << ", " << secs << " s";
}

// Round-robin classes so every graph has same-class candidates somewhere.
ClassHierarchy classes_for(std::size_t n, std::size_t k) {
  HierarchyBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add(oracle::node_name(i), "c" + std::to_string(i % k), true);
  for (std::size_t c = 0; c < k; ++c) b.add("c" + std::to_string(c), "root", false);
  return std::move(b).build();
}

std::vector<EntityId> every_entity(const KnowledgeGraph& g) {
  std::vector<EntityId> out(g.entity_count());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

void hop_invariant(Outcome& o) {
  std::size_t negatives = 0, ends = 0, pairs = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = oracle::random_graph(20 + seed % 21, 0.08, 31000 + seed, 0.1);
    const auto d = oracle::all_pairs_hops(g);
    AugmentConfig cfg;
    cfg.seed = seed;
    const auto out = build_all(g, classes_for(g.entity_count(), 3), cfg, every_entity(g));
    for (const auto& rec : out.records) {
      if (rec.kind != SampleKind::Negative) continue;
      ++negatives;
      for (std::size_t s = 0; s < rec.segments.size(); ++s) {
        const auto& seg = rec.segments[s];
        ++ends;
        o.require(d[rec.anchor][seg.end_node] == static_cast<int>(*rec.level + 1), "hop level");
        const auto nodes = path_nodes(g, rec.anchor, seg.triples);
        o.require(nodes.back() == seg.end_node, "path end");
        if (s == 0 || rec.segments[s - 1].end_node != seg.end_node) continue;
        ++pairs;
        const auto first = path_nodes(g, rec.anchor, rec.segments[s - 1].triples);
        for (std::size_t i = 1; i + 1 < first.size(); ++i) {
          for (std::size_t j = 1; j + 1 < nodes.size(); ++j) {
            o.require(first[i] != nodes[j], "second path shares an interior node");
          }
        }
      }
    }
  }
  o.require(negatives > 0 && pairs > 0, "nothing sampled");
  o.detail << negatives << " negatives, " << ends << " path segments, " << pairs
           << " disjoint pairs checked";
}

void same_class(Outcome& o) {
  std::size_t checked = 0, hits = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = oracle::random_graph(30, 0.09, 52000 + seed);
    const auto d = oracle::all_pairs_hops(g);
    const std::size_t k = 2 + seed % 4;
    const auto out = build_all(g, classes_for(30, k), AugmentConfig{}, every_entity(g));
    for (const auto& rec : out.records) {
      if (rec.kind != SampleKind::Negative) continue;
      const int hop = static_cast<int>(*rec.level + 1);
      bool available = false;
      for (EntityId e = 0; e < 30; ++e) {
        available = available || (d[rec.anchor][e] == hop && e % k == rec.anchor % k);
      }
      if (!available) continue;
      for (const auto& seg : rec.segments) {
        ++checked;
        hits += seg.end_node % k == rec.anchor % k;
      }
    }
  }
  o.require(checked > 0 && hits == checked, "cross-class end chosen");
  o.detail << hits << "/" << checked << " end nodes share the anchor's class";
}

void gradients(Outcome& o) {
  fusion::FuseCheckConfig cfg;
  cfg.instances = 20;
  const double inf = fusion::infusion_gradient_error(cfg);
  const double inj = fusion::injector_gradient_error(cfg, fusion::Aggregation::Sequential);
  const double nce = fusion::info_nce_gradient_error(cfg);
  const double hyp = fusion::poincare_loss_gradient_error(cfg);
  o.require(inf < 1e-4, "infusion");
  o.require(inj < 1e-4, "injector");
  o.require(nce < 1e-4, "info_nce");
  o.require(hyp < 1e-4, "hyponymy loss");
  for (const auto& r : fusion::run_fuse_check(cfg)) {
    if (r.name.rfind("layer_norm", 0) == 0) o.require(r.passed, r.name);
  }
  o.detail << "20 instances each; worst rel err infusion=" << inf << " injector=" << inj
           << " info_nce=" << nce << " hyponymy=" << hyp;
}

void closed_forms(Outcome& o) {
  fusion::RowVector a(3), p(3), n(3);
  a << 1, 0, 0;
  p << 4, 0, 0;
  n << 0, 0, 2;
  const std::vector<fusion::RowVector> one{n};
  const double single = fusion::info_nce(a, p, one, 1.0);
  o.require(std::abs(single - std::log1p(std::exp(-1.0))) < 1e-9, "single negative");
  o.require(std::abs(single - 0.313262) < 1e-6, "0.313262");
  double worst = 0.0;
  for (std::size_t k = 1; k <= 8; ++k) {
    const std::vector<fusion::RowVector> same(k, a);
    worst = std::max(worst, std::abs(fusion::info_nce(a, a, same, 0.6) - std::log(k + 1.0)));
  }
  o.require(worst < 1e-12, "equal logits");
  const double total = fusion::total_loss(2, 4, 0.5, 0.5);
  o.require(total == 3.0, "total loss");
  o.detail << "single=" << std::setprecision(12) << single << " equal-logit worst diff=" << worst
           << " total=" << total;
}

std::uint64_t fnv1a(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::uint64_t h = 1469598103934665603ULL;
  for (char c; in.get(c);) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::map<std::string, std::uint64_t> hash_dir(const fs::path& dir) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = fnv1a(e.path());
  return out;
}

void determinism(Outcome& o) {
  const fs::path dir = fs::current_path() / "acceptance_all";
  auto run_all = [&] {
    fs::remove_all(dir);
    const std::string line = std::string(KGAUG_CLI_PATH) + " --config " KGAUG_DATA_DIR
                             "/example.conf --seed 42 --out " + dir.string() + " all --kg " +
                             KGAUG_DATA_DIR "/medical_kg.tsv --classes " KGAUG_DATA_DIR
                             "/medical_classes.tsv --corpus " KGAUG_DATA_DIR
                             "/medical_corpus.txt --instances 5 > /dev/null 2>&1";
    const int status = std::system(line.c_str());
    o.require(status == 0, "all exited nonzero");
    return hash_dir(dir);
  };
  const auto first = run_all();
  const auto second = run_all();
  o.require(first.size() >= 5, "missing artifacts");
  o.require(first == second, "artifact hashes differ");
  o.detail << first.size() << " artifacts:";
  for (const auto& [name, h] : first) o.detail << " " << name << "=" << std::hex << h << std::dec;
}

void level_sanity(Outcome& o) {
  auto warnings = [](const AugmentConfig& c) {
    std::vector<std::string> out;
    for (const auto& d : validate_level_config(c)) {
      if (d.severity == Diagnostic::Severity::Warning) out.push_back(d.message);
    }
    return out;
  };
  o.require(warnings(AugmentConfig{}).empty(), "default warns");
  o.require(validate_config(PipelineConfig{}).empty(), "default pipeline config warns");

  AugmentConfig s2;  // negatives never beyond the positive hop
  s2.k = 1;
  s2.negative_hop_offset = 0;
  const auto w2 = warnings(s2);
  o.require(w2.size() == 1 && w2[0].find("S2") != std::string::npos, "S2 not flagged");

  AugmentConfig s2b;  // positives pushed out to hop 4, negatives at 2..4
  s2b.positive_hop = 4;
  const auto w2b = warnings(s2b);
  o.require(w2b.size() == 1 && w2b[0].find("S2") != std::string::npos, "S2 (far positives)");

  AugmentConfig s3;  // negatives at hops 1..3 overlap the hop-1 positives
  s3.negative_hop_offset = 0;
  const auto w3 = warnings(s3);
  o.require(w3.size() == 1 && w3[0].find("S3") != std::string::npos, "S3 not flagged");

  AugmentConfig s3b;
  s3b.positive_hop = 2;
  const auto w3b = warnings(s3b);
  o.require(w3b.size() == 1 && w3b[0].find("S3") != std::string::npos, "S3 (hop-2 positives)");
  o.detail << "default: 0 warnings; S2 and S3 configurations each raise one warning";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"1 block decomposition equals brute-force oracle", block_oracle},
      {"2 indicator report on bundled graph", indicators},
      {"3 Poincare distance and ball invariant", poincare_distance_checks},
      {"4 Poincare hierarchy reconstruction", reconstruction},
      {"5 negative hop level and disjoint second paths", hop_invariant},
      {"6 same-class end node preference", same_class},
      {"7 gradient checks and layer norm properties", gradients},
      {"8 closed-form loss values", closed_forms},
      {"9 byte-identical reruns of all", determinism},
      {"10 level sanity warnings", level_sanity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.passed ? "PASS " : "FAIL ") << name << " (" << o.detail.str() << ")"
              << std::endl;
    failures += !o.passed;
  }
  return failures == 0 ? 0 : 1;
}
