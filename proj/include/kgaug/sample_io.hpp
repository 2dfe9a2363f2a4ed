#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgaug/augment.hpp"

namespace kgaug {

/// One JSON object per line: anchor, kind, level, tokens, position_index,
/// paths_merged, truncated (in that key order).
void write_jsonl(std::ostream& os, const KnowledgeGraph& g, std::span<const SampleRecord> records);
std::string to_json_line(const KnowledgeGraph& g, const SampleRecord& record);

/// Parsed form of a JSONL line, for consumers that only see the file.
struct SampleLine {
  std::string anchor;
  SampleKind kind = SampleKind::Positive;
  std::optional<std::size_t> level;
  std::vector<std::string> tokens;
  std::vector<int> position_index;
  std::size_t paths_merged = 0;
  bool truncated = false;
};

SampleLine parse_json_line(const std::string& line);
std::vector<SampleLine> read_jsonl(std::istream& in);

}  // namespace kgaug
