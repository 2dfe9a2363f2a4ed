#include "kgaug/sample_io.hpp"

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace kgaug {

std::string to_json_line(const KnowledgeGraph& g, const SampleRecord& record) {
  nlohmann::ordered_json j;
  j["anchor"] = g.label(record.anchor);
  j["kind"] = record.kind == SampleKind::Positive ? "positive" : "negative";
  j["level"] = record.level ? nlohmann::ordered_json(*record.level) : nlohmann::ordered_json();
  j["tokens"] = record.tokens;
  j["position_index"] = record.position_index;
  j["paths_merged"] = record.paths_merged;
  j["truncated"] = record.truncated;
  return j.dump();
}

void write_jsonl(std::ostream& os, const KnowledgeGraph& g, std::span<const SampleRecord> records) {
  for (const SampleRecord& r : records) os << to_json_line(g, r) << '\n';
}

SampleLine parse_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  SampleLine s;
  s.anchor = j.at("anchor").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "positive") {
    s.kind = SampleKind::Positive;
  } else if (kind == "negative") {
    s.kind = SampleKind::Negative;
  } else {
    throw std::invalid_argument("unknown sample kind '" + kind + "'");
  }
  if (!j.at("level").is_null()) s.level = j.at("level").get<std::size_t>();
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  s.position_index = j.at("position_index").get<std::vector<int>>();
  s.paths_merged = j.at("paths_merged").get<std::size_t>();
  s.truncated = j.at("truncated").get<bool>();
  return s;
}

std::vector<SampleLine> read_jsonl(std::istream& in) {
  std::vector<SampleLine> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_json_line(line));
  }
  return out;
}

}  // namespace kgaug
