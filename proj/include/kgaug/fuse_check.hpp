#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgaug/fusion.hpp"

namespace kgaug::fusion {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct FuseCheckConfig {
  FusionDims dims = FusionDims::desk_scale();
  std::size_t instances = 20;
  std::uint64_t seed = 42;
  double tolerance = 1e-4;  // relative gradient error
  double step = 1e-5;       // central-difference step
};

// Worst relative error between the analytic gradient and central differences
// over `instances` random problems; each covers every parameter and input.
double infusion_gradient_error(const FuseCheckConfig& cfg);
double injector_gradient_error(const FuseCheckConfig& cfg, Aggregation aggregation);
double info_nce_gradient_error(const FuseCheckConfig& cfg);
double poincare_loss_gradient_error(const FuseCheckConfig& cfg);

/// Every numeric invariant of the fusion and loss code, one result each.
std::vector<PropertyResult> run_fuse_check(const FuseCheckConfig& cfg);
void print_results(std::ostream& os, const std::vector<PropertyResult>& results);

}  // namespace kgaug::fusion
