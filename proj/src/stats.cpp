#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "kgaug/rng.hpp"
#include "kgaug/stats.hpp"
#include "kgaug/text.hpp"

namespace kgaug {

EntityMatcher::EntityMatcher(const KnowledgeGraph& g, std::size_t match_threshold)
    : threshold_(match_threshold) {
  if (match_threshold == 0) throw std::invalid_argument("match_threshold must be positive");
  labels_.reserve(g.entity_count());
  for (EntityId e = 0; e < g.entity_count(); ++e) {
    auto tokens = tokenize(g.label(e));
    if (tokens.empty()) continue;
    by_first_[tokens.front()].push_back(labels_.size());
    labels_.push_back(std::move(tokens));
  }
}

std::vector<char> EntityMatcher::cover(std::span<const std::string> tokens) const {
  std::vector<char> covered(tokens.size(), 0);
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best = 0;
    if (auto it = by_first_.find(tokens[i]); it != by_first_.end()) {
      for (std::size_t idx : it->second) {
        const auto& label = labels_[idx];
        std::size_t w = 0;
        while (w < label.size() && i + w < tokens.size() && tokens[i + w] == label[w]) ++w;
        if (w == label.size() || w > threshold_) best = std::max(best, w);
      }
    }
    if (best == 0) {
      ++i;
      continue;
    }
    std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(i), best, 1);
    i += best;
  }
  return covered;
}

double coverage_ratio(std::span<const std::string> corpus_tokens, const KnowledgeGraph& g,
                      std::size_t match_threshold) {
  if (corpus_tokens.empty()) throw std::invalid_argument("coverage_ratio: empty corpus");
  const auto covered = EntityMatcher(g, match_threshold).cover(corpus_tokens);
  const auto hits = std::count(covered.begin(), covered.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(corpus_tokens.size());
}

double induced_density(const KnowledgeGraph& g, std::span<const EntityId> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("induced_density needs at least 2 nodes");
  std::vector<EntityId> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t edges = 0;
  for (EntityId v : sorted) {
    for (EntityId w : g.neighbors(v)) {
      if (w > v && std::binary_search(sorted.begin(), sorted.end(), w)) ++edges;
    }
  }
  const double n = static_cast<double>(sorted.size());
  return static_cast<double>(edges) / (n * (n - 1.0));
}

std::size_t density_sample_size(const KnowledgeGraph& g, const DensityConfig& cfg) {
  if (!(cfg.node_fraction > 0.0 && cfg.node_fraction <= 1.0)) {
    throw std::invalid_argument("node_fraction must lie in (0, 1]");
  }
  if (cfg.samples == 0) throw std::invalid_argument("samples must be positive");
  if (g.entity_count() < 2) {
    throw GraphError("subgraph density needs at least 2 nodes, graph has " +
                     std::to_string(g.entity_count()));
  }
  // a pair is the smallest subgraph with a defined density
  const auto size = static_cast<std::size_t>(
      std::ceil(cfg.node_fraction * static_cast<double>(g.entity_count()) - 1e-12));
  return std::max<std::size_t>(size, 2);
}

std::vector<EntityId> density_sample(const KnowledgeGraph& g, const DensityConfig& cfg,
                                     std::size_t index) {
  const std::size_t size = density_sample_size(g, cfg);
  const std::size_t n = g.entity_count();
  Rng rng(derive_seed(cfg.seed, index));
  // Floyd's sampling: exactly `size` distinct ids
  std::vector<EntityId> picked;
  picked.reserve(size);
  std::vector<char> taken(n, 0);
  for (std::size_t j = n - size; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    std::size_t t = pick(rng);
    if (taken[t]) t = j;
    taken[t] = 1;
    picked.push_back(static_cast<EntityId>(t));
  }
  return picked;
}

double subgraph_density_serial(const KnowledgeGraph& g, const DensityConfig& cfg) {
  density_sample_size(g, cfg);
  double total = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    total += induced_density(g, density_sample(g, cfg, i));
  }
  return total / static_cast<double>(cfg.samples);
}

double subgraph_density(const KnowledgeGraph& g, const DensityConfig& cfg) {
  density_sample_size(g, cfg);
  std::vector<double> per_sample(cfg.samples);
  const auto count = static_cast<std::ptrdiff_t>(cfg.samples);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    per_sample[static_cast<std::size_t>(i)] =
        induced_density(g, density_sample(g, cfg, static_cast<std::size_t>(i)));
  }
  // fixed summation order keeps the result identical to the serial loop
  double total = 0.0;
  for (double d : per_sample) total += d;
  return total / static_cast<double>(cfg.samples);
}

void IndicatorReport::write_key_values(std::ostream& os) const {
  os << "nodes=" << node_count << "\n"
     << "edges=" << edge_count << "\n"
     << "coverage_ratio=";
  if (coverage_ratio) {
    os << *coverage_ratio;
  } else {
    os << "na";
  }
  os << "\n"
     << "max_pbc_ratio=" << max_pbc_ratio << "\n"
     << "subgraph_density=" << subgraph_density << "\n";
}

nlohmann::json IndicatorReport::to_json() const {
  nlohmann::json j;
  j["nodes"] = node_count;
  j["edges"] = edge_count;
  j["coverage_ratio"] = coverage_ratio ? nlohmann::json(*coverage_ratio) : nlohmann::json();
  j["max_pbc_ratio"] = max_pbc_ratio;
  j["subgraph_density"] = subgraph_density;
  return j;
}

IndicatorReport indicator_report(const KnowledgeGraph& g,
                                 std::optional<std::span<const std::string>> corpus_tokens,
                                 const StatsConfig& cfg) {
  IndicatorReport r;
  r.node_count = g.entity_count();
  r.edge_count = g.triple_count();
  if (corpus_tokens) r.coverage_ratio = coverage_ratio(*corpus_tokens, g, cfg.match_threshold);
  r.max_pbc_ratio = max_pbc_ratio(g);
  r.subgraph_density = subgraph_density(g, cfg.density);
  return r;
}

}  // namespace kgaug
