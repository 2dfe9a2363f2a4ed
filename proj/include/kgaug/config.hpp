#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgaug/augment.hpp"
#include "kgaug/fusion.hpp"
#include "kgaug/poincare.hpp"
#include "kgaug/stats.hpp"

namespace kgaug {

/// Every knob of the pipeline. Defaults are the published pretraining
/// settings (d1=768, d2=d3=100, d4=768, M=6, N=5, tau=1, lambdas 0.5, k=3).
struct PipelineConfig {
  std::filesystem::path kg;
  std::filesystem::path classes;
  std::filesystem::path corpus;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  bool verbose = false;

  StatsConfig stats;
  TrainConfig embed;
  AugmentConfig augment;
  fusion::FusionDims fusion;
  std::size_t encoder_layers = 5;  // N
  double tau = 1.0;
  double lambda_mlm = 0.5;
  double lambda_cl = 0.5;
  fusion::Aggregation aggregation = fusion::Aggregation::Sequential;
  std::size_t check_instances = 20;

  /// Pushes the global seed into every module config.
  void apply_seed(std::uint64_t s);
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; `#` starts a comment. Unknown keys are errors.
void apply_config_text(PipelineConfig& cfg, std::istream& in, const std::string& name);
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);
/// Round-trippable `key = value` rendering of the whole config.
void write_config(std::ostream& os, const PipelineConfig& cfg);

/// Structural checks plus the negative-level sanity rule. Never throws.
std::vector<Diagnostic> validate_config(const PipelineConfig& cfg);

}  // namespace kgaug
