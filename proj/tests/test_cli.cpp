// Runs the built command-line tool as a subprocess.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgaug/sample_io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = KGAUG_DATA_DIR;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(KGAUG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "kgaug_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string graph_args() {
  return "--kg " + kData + "/medical_kg.tsv --classes " + kData + "/medical_classes.tsv";
}

}  // namespace

TEST_CASE("stats reports all five indicators") {
  const auto dir = scratch();
  const auto log = dir / "stats.log";
  REQUIRE(run_cli("stats " + graph_args() + " --corpus " + kData +
                      "/medical_corpus.txt --out " + (dir / "stats.json").string(),
                  log) == 0);
  const auto out = slurp(log);
  for (const char* key : {"nodes=62", "edges=84", "coverage_ratio=", "max_pbc_ratio=",
                          "subgraph_density="}) {
    CHECK(out.find(key) != std::string::npos);
  }
  std::ifstream in(dir / "stats.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["coverage_ratio"].get<double>() == doctest::Approx(19.0 / 49.0).epsilon(1e-15));
}

TEST_CASE("augment emits k negatives per anchor by default") {
  const auto dir = scratch();
  const auto jsonl = dir / "samples.jsonl";
  REQUIRE(run_cli("augment " + graph_args() + " --out " + jsonl.string(), dir / "aug.log") == 0);
  std::ifstream in(jsonl);
  const auto lines = kgaug::read_jsonl(in);
  std::size_t max_level = 0;
  for (const auto& l : lines) {
    if (l.level) max_level = std::max(max_level, *l.level);
  }
  CHECK(max_level == 3);
}

TEST_CASE("validation failures exit nonzero") {
  const auto dir = scratch();
  CHECK(run_cli("fuse-check --tau 0", dir / "tau.log") != 0);
  CHECK(slurp(dir / "tau.log").find("tau") != std::string::npos);
  CHECK(run_cli("stats --kg " + (dir / "missing.tsv").string() + " --classes x", dir / "m.log") != 0);
  CHECK(run_cli("augment " + graph_args() + " --k 0", dir / "k.log") != 0);
}

TEST_CASE("level warnings do not change the exit status") {
  const auto dir = scratch();
  REQUIRE(run_cli("augment " + graph_args() + " --negative-hop-offset 0 --out " +
                      (dir / "s3.jsonl").string(),
                  dir / "s3.log") == 0);
  CHECK(slurp(dir / "s3.log").find("warning: ") != std::string::npos);
}

TEST_CASE("embed writes a TSV and a header") {
  const auto dir = scratch();
  const auto tsv = dir / "emb.tsv";
  REQUIRE(run_cli("embed --classes " + kData + "/medical_classes.tsv --dim 4 --epochs 5 --out " +
                      tsv.string(),
                  dir / "embed.log") == 0);
  CHECK(slurp(fs::path(tsv.string() + ".header")).find("dim=4\n") != std::string::npos);
}

TEST_CASE("flags override config file values") {
  const auto dir = scratch();
  {
    std::ofstream conf(dir / "c.conf");
    conf << "kg = " << kData << "/medical_kg.tsv\nclasses = " << kData
         << "/medical_classes.tsv\nstats.samples = 3\nseed = 5\n";
  }
  REQUIRE(run_cli("--config " + (dir / "c.conf").string() + " --seed 6 stats --samples 4 --out " +
                      (dir / "a.json").string(),
                  dir / "a.log") == 0);
  REQUIRE(run_cli("stats " + graph_args() + " --samples 4 --seed 6 --out " +
                      (dir / "b.json").string(),
                  dir / "b.log") == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}
