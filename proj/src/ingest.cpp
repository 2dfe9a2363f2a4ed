#include "kgaug/ingest.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace kgaug {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return fields;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ifstream open_or_throw(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
  return in;
}

}  // namespace

void IngestReport::write(std::ostream& os) const {
  os << "ingest: " << triples_accepted << " triples accepted from " << triple_rows << " rows ("
     << self_loops << " self-loops, " << duplicate_triples << " duplicates, "
     << malformed_triple_rows << " malformed); hierarchy " << hierarchy_accepted << "/"
     << hierarchy_rows << " rows accepted\n";
  for (const auto& issue : issues) {
    os << "  " << issue.file << ":" << issue.line << ": " << issue.reason << "\n";
  }
  os << "triple_rows=" << triple_rows << "\n"
     << "triples_accepted=" << triples_accepted << "\n"
     << "self_loops=" << self_loops << "\n"
     << "duplicate_triples=" << duplicate_triples << "\n"
     << "malformed_triple_rows=" << malformed_triple_rows << "\n"
     << "hierarchy_rows=" << hierarchy_rows << "\n"
     << "hierarchy_accepted=" << hierarchy_accepted << "\n"
     << "hierarchy_rejected=" << hierarchy_rejected << "\n";
}

void read_triples(std::istream& in, const std::string& name, GraphBuilder& builder,
                  IngestReport& report) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (blank(line) || line.front() == '#') continue;
    ++report.triple_rows;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      ++report.malformed_triple_rows;
      report.issues.push_back({name, line_no,
                               "expected 3 tab-separated fields, got " +
                                   std::to_string(fields.size())});
      continue;
    }
    switch (builder.add(fields[0], fields[1], fields[2])) {
      case GraphBuilder::AddResult::Added:
        ++report.triples_accepted;
        break;
      case GraphBuilder::AddResult::Duplicate:
        ++report.duplicate_triples;
        break;
      case GraphBuilder::AddResult::SelfLoop:
        ++report.self_loops;
        report.issues.push_back({name, line_no, "self-loop triple rejected"});
        break;
      case GraphBuilder::AddResult::EmptyField:
        ++report.malformed_triple_rows;
        report.issues.push_back({name, line_no, "empty field"});
        break;
    }
  }
}

void read_hierarchy(std::istream& in, const std::string& name, HierarchyBuilder& builder,
                    IngestReport& report) {
  std::string raw;
  std::size_t line_no = 0;
  auto reject = [&](std::string reason) {
    ++report.hierarchy_rejected;
    report.issues.push_back({name, line_no, std::move(reason)});
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (blank(line) || line.front() == '#') continue;
    ++report.hierarchy_rows;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      reject("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
      continue;
    }
    std::string_view kind = fields[2];
    while (!kind.empty() && kind.back() == ' ') kind.remove_suffix(1);
    if (kind != "ec" && kind != "cc") {
      reject("unknown row kind '" + std::string(kind) + "' (expected ec or cc)");
      continue;
    }
    switch (builder.add(fields[0], fields[1], kind == "ec")) {
      case HierarchyBuilder::AddResult::Added:
        ++report.hierarchy_accepted;
        break;
      case HierarchyBuilder::AddResult::Duplicate:
        break;
      case HierarchyBuilder::AddResult::KindConflict:
        reject("label used both as entity and as class");
        break;
      case HierarchyBuilder::AddResult::SecondParent:
        reject("child already has a different parent");
        break;
      case HierarchyBuilder::AddResult::EmptyField:
        reject("empty field");
        break;
    }
  }
}

LoadedGraph load_graph(const std::filesystem::path& triples_path,
                       const std::filesystem::path& classes_path) {
  LoadedGraph out;
  GraphBuilder gb;
  {
    auto in = open_or_throw(triples_path);
    read_triples(in, triples_path.filename().string(), gb, out.report);
  }
  HierarchyBuilder hb;
  {
    auto in = open_or_throw(classes_path);
    read_hierarchy(in, classes_path.filename().string(), hb, out.report);
  }
  out.graph = std::move(gb).build();
  out.hierarchy = std::move(hb).build();
  return out;
}

}  // namespace kgaug
