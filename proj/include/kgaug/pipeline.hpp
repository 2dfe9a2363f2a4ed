#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgaug/config.hpp"

namespace kgaug {

/// Where each subcommand writes. Unset entries fall back to fixed names
/// inside the output directory.
struct ArtifactPaths {
  std::optional<std::filesystem::path> stats_report;  // JSON
  std::optional<std::filesystem::path> embeddings;    // TSV; header at <path>.header
  std::optional<std::filesystem::path> samples;       // JSONL
  std::optional<std::filesystem::path> check_report;
  bool write_snapshot = false;

  std::filesystem::path stats_path(const PipelineConfig& cfg) const;
  std::filesystem::path embeddings_path(const PipelineConfig& cfg) const;
  std::filesystem::path samples_path(const PipelineConfig& cfg) const;
  std::filesystem::path check_path(const PipelineConfig& cfg) const;
};

enum class Subcommand { Stats, Embed, Augment, FuseCheck, All };

std::optional<Subcommand> parse_subcommand(const std::string& name);

/// Validates the config, runs the subcommand and writes its artifacts.
/// Returns 0 iff no error was reported. Results go to `out`, diagnostics to `err`.
int run(Subcommand cmd, const PipelineConfig& cfg, const ArtifactPaths& paths,
        std::ostream& out, std::ostream& err);

/// Corpus file as one token stream: each line is normalized then tokenized.
std::vector<std::string> read_corpus(const std::filesystem::path& path);

}  // namespace kgaug
