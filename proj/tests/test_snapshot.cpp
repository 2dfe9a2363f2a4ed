#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "kgaug/snapshot.hpp"

using namespace kgaug::fusion;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kgaug_snapshot_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("snapshot round trip is exact") {
  auto p = FusionParams::init(FusionDims::desk_scale(), 77);
  p.tau = 0.25;
  p.aggregation = Aggregation::LiteralSum;
  const auto bin = scratch("p.bin"), manifest = scratch("p.json");
  write_snapshot(p, bin, manifest);

  std::size_t elements = 0;
  for (const auto& [name, m] : named_tensors(p)) elements += static_cast<std::size_t>(m->size());
  CHECK(fs::file_size(bin) == elements * sizeof(double));

  const auto q = read_snapshot(bin, manifest);
  CHECK(q.tau == 0.25);
  CHECK(q.aggregation == Aggregation::LiteralSum);
  const auto a = named_tensors(p);
  const auto b = named_tensors(q);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(*a[i].second == *b[i].second);
  }
}

TEST_CASE("manifest lists shapes and offsets") {
  const auto p = FusionParams::init(FusionDims::desk_scale(), 1);
  const auto bin = scratch("m.bin"), manifest = scratch("m.json");
  write_snapshot(p, bin, manifest);
  std::ifstream in(manifest);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["dtype"] == "float64");
  const auto& first = j["tensors"][0];
  CHECK(first["name"] == "infusion.weight");
  CHECK(first["shape"] == nlohmann::json::array({8 + 16, 8}));
  CHECK(first["offset"] == 0);
  CHECK(j["tensors"][1]["offset"] == 24 * 8);
}

TEST_CASE("truncated binaries are rejected") {
  const auto p = FusionParams::init(FusionDims::desk_scale(), 1);
  const auto bin = scratch("t.bin"), manifest = scratch("t.json");
  write_snapshot(p, bin, manifest);
  fs::resize_file(bin, fs::file_size(bin) - 8);
  CHECK_THROWS(read_snapshot(bin, manifest));
}
