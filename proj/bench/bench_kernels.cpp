// Serial reference kernels against their OpenMP counterparts on a seeded
// random graph. Results of both variants are identical by construction.

#include <map>
#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "kgaug/augment.hpp"
#include "kgaug/stats.hpp"

namespace {

struct Fixture {
  kgaug::KnowledgeGraph graph;
  kgaug::ClassHierarchy hierarchy;
  std::vector<kgaug::EntityId> anchors;
};

const Fixture& fixture(std::size_t nodes) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(nodes);
  if (it != cache.end()) return it->second;

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
  kgaug::GraphBuilder gb;
  kgaug::HierarchyBuilder hb;
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::string name = "n" + std::to_string(i);
    gb.intern_entity(name);
    hb.add(name, "c" + std::to_string(i % 5), true);
  }
  for (std::size_t c = 0; c < 5; ++c) hb.add("c" + std::to_string(c), "root", false);
  for (std::size_t i = 1; i < nodes; ++i) {
    gb.add("n" + std::to_string(i), "r", "n" + std::to_string(pick(rng) % i));
  }
  for (std::size_t extra = 0; extra < nodes * 2; ++extra) {
    gb.add("n" + std::to_string(pick(rng)), "s", "n" + std::to_string(pick(rng)));
  }
  Fixture f{std::move(gb).build(), std::move(hb).build(), {}};
  for (kgaug::EntityId e = 0; e < f.graph.entity_count(); ++e) f.anchors.push_back(e);
  return cache.emplace(nodes, std::move(f)).first->second;
}

void BM_DensitySerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  kgaug::DensityConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kgaug::subgraph_density_serial(f.graph, cfg));
}

void BM_DensityParallel(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  kgaug::DensityConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kgaug::subgraph_density(f.graph, cfg));
}

void BM_AugmentSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  const kgaug::Augmenter aug(f.graph, f.hierarchy, {});
  for (auto _ : state) benchmark::DoNotOptimize(aug.all_serial(f.anchors).records.size());
}

void BM_AugmentParallel(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  const kgaug::Augmenter aug(f.graph, f.hierarchy, {});
  for (auto _ : state) benchmark::DoNotOptimize(aug.all(f.anchors).records.size());
}

}  // namespace

BENCHMARK(BM_DensitySerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_DensityParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_AugmentSerial)->Arg(200)->Arg(1000);
BENCHMARK(BM_AugmentParallel)->Arg(200)->Arg(1000);

BENCHMARK_MAIN();
