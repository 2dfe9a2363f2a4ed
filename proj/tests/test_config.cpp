#include <doctest.h>

#include <sstream>

#include "kgaug/config.hpp"

using namespace kgaug;

namespace {

std::size_t count(const std::vector<Diagnostic>& d, Diagnostic::Severity s) {
  return static_cast<std::size_t>(
      std::count_if(d.begin(), d.end(), [&](const Diagnostic& x) { return x.severity == s; }));
}

}  // namespace

TEST_CASE("defaults are the published pretraining settings") {
  const PipelineConfig cfg;
  CHECK(cfg.fusion.d1 == 768);
  CHECK(cfg.fusion.d2 == 100);
  CHECK(cfg.fusion.d3 == 100);
  CHECK(cfg.fusion.d4 == 768);
  CHECK(cfg.fusion.layers == 6);
  CHECK(cfg.encoder_layers == 5);
  CHECK(cfg.tau == 1.0);
  CHECK(cfg.lambda_mlm == 0.5);
  CHECK(cfg.lambda_cl == 0.5);
  CHECK(cfg.augment.k == 3);
  CHECK(cfg.embed.dim == 100);
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("non-positive temperature is rejected") {
  PipelineConfig cfg;
  cfg.tau = 0.0;
  CHECK(count(validate_config(cfg), Diagnostic::Severity::Error) == 1);
  cfg.tau = -1.0;
  CHECK(count(validate_config(cfg), Diagnostic::Severity::Error) == 1);
}

TEST_CASE("infusion shape mismatch is rejected with a shape message") {
  PipelineConfig cfg;
  cfg.fusion.d2 = 64;
  const auto d = validate_config(cfg);
  REQUIRE(count(d, Diagnostic::Severity::Error) == 1);
  CHECK(d[0].message.find("shape") != std::string::npos);
  CHECK(d[0].message.find("d2=64") != std::string::npos);
}

TEST_CASE("level warnings pass through without failing validation") {
  PipelineConfig cfg;
  cfg.augment.negative_hop_offset = 0;
  const auto d = validate_config(cfg);
  CHECK(count(d, Diagnostic::Severity::Warning) == 1);
  CHECK(count(d, Diagnostic::Severity::Error) == 0);
}

TEST_CASE("config text sets values and reports bad lines") {
  PipelineConfig cfg;
  std::istringstream in(
      "# manifest\n"
      "seed = 7\n"
      "augment.k = 2   # fewer levels\n"
      "fusion.aggregation = literal_sum\n"
      "kg = data/x.tsv\n");
  apply_config_text(cfg, in, "m.conf");
  CHECK(cfg.seed == 7);
  CHECK(cfg.augment.seed == 7);
  CHECK(cfg.embed.seed == 7);
  CHECK(cfg.stats.density.seed == 7);
  CHECK(cfg.augment.k == 2);
  CHECK(cfg.aggregation == fusion::Aggregation::LiteralSum);
  CHECK(cfg.kg == "data/x.tsv");

  std::istringstream unknown("nope = 1\n");
  CHECK_THROWS_WITH_AS(apply_config_text(cfg, unknown, "m.conf"), "m.conf:1: unknown config key 'nope'",
                       ConfigError);
  std::istringstream bad("\n\naugment.K = two\n");
  CHECK_THROWS_WITH_AS(apply_config_text(cfg, bad, "m.conf"),
                       "m.conf:3: invalid value 'two' for augment.K", ConfigError);
  std::istringstream missing("augment.K 2\n");
  CHECK_THROWS_AS(apply_config_text(cfg, missing, "m.conf"), ConfigError);
}

TEST_CASE("written config reads back identically") {
  PipelineConfig a;
  a.apply_seed(99);
  a.embed.lr = 0.123456789012345;
  a.augment.same_class_preference = false;
  a.corpus = "c.txt";
  std::ostringstream os;
  write_config(os, a);
  PipelineConfig b;
  std::istringstream in(os.str());
  apply_config_text(b, in, "round-trip");
  std::ostringstream again;
  write_config(again, b);
  CHECK(os.str() == again.str());
  CHECK(b.embed.lr == a.embed.lr);
}
