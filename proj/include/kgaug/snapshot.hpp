#pragma once

#include <filesystem>

#include "kgaug/fusion.hpp"

namespace kgaug::fusion {

/// Raw little-endian float64 values of every tensor in named_tensors order,
/// row-major, plus a JSON manifest with names, shapes, element offsets and
/// the scalar hyperparameters.
void write_snapshot(const FusionParams& p, const std::filesystem::path& binary,
                    const std::filesystem::path& manifest);
FusionParams read_snapshot(const std::filesystem::path& binary,
                           const std::filesystem::path& manifest);

}  // namespace kgaug::fusion
