#include "kgaug/pipeline.hpp"

#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "kgaug/fuse_check.hpp"
#include "kgaug/ingest.hpp"
#include "kgaug/sample_io.hpp"
#include "kgaug/snapshot.hpp"
#include "kgaug/text.hpp"

namespace kgaug {

namespace fs = std::filesystem;

namespace {

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RunError("cannot write '" + path.string() + "'");
  return os;
}

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw RunError(std::string("missing --") + what + " path");
  if (!fs::is_regular_file(path)) {
    throw RunError(std::string(what) + " file not found: '" + path.string() + "'");
  }
}

ClassHierarchy load_hierarchy(const fs::path& path, std::ostream& err, bool verbose) {
  require_file(path, "classes");
  std::ifstream in(path);
  HierarchyBuilder builder;
  IngestReport report;
  read_hierarchy(in, path.filename().string(), builder, report);
  if (verbose || !report.issues.empty()) report.write(err);
  return std::move(builder).build();
}

LoadedGraph load(const PipelineConfig& cfg, std::ostream& err) {
  require_file(cfg.kg, "kg");
  require_file(cfg.classes, "classes");
  LoadedGraph loaded = load_graph(cfg.kg, cfg.classes);
  loaded.report.write(err);
  return loaded;
}

void run_stats(const PipelineConfig& cfg, const LoadedGraph& loaded, const ArtifactPaths& paths,
               std::ostream& out) {
  std::optional<std::vector<std::string>> corpus;
  if (!cfg.corpus.empty()) {
    require_file(cfg.corpus, "corpus");
    corpus = read_corpus(cfg.corpus);
  }
  std::optional<std::span<const std::string>> view;
  if (corpus) view = std::span<const std::string>(*corpus);
  const IndicatorReport report = indicator_report(loaded.graph, view, cfg.stats);
  report.write_key_values(out);
  auto os = open_output(paths.stats_path(cfg));
  os << report.to_json().dump(2) << "\n";
}

void run_embed(const PipelineConfig& cfg, const ClassHierarchy& hierarchy,
               const ArtifactPaths& paths, std::ostream& out, std::ostream& err) {
  if (hierarchy.empty()) throw RunError("hierarchy is empty; nothing to embed");
  TrainLog log;
  const PoincareModel model = train(hierarchy, cfg.embed, &log);
  if (cfg.verbose) {
    for (std::size_t e = 0; e < log.epoch_loss.size(); e += 25) {
      err << "epoch " << e << " loss " << log.epoch_loss[e] << "\n";
    }
  }
  const fs::path tsv = paths.embeddings_path(cfg);
  {
    auto os = open_output(tsv);
    write_embeddings(os, model, hierarchy);
  }
  {
    auto os = open_output(fs::path(tsv.string() + ".header"));
    write_embedding_header(os, model, cfg.embed);
  }
  out << "embedded_nodes=" << model.data().rows() << "\n"
      << "dim=" << model.data().cols() << "\n"
      << "final_loss=" << (log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back()) << "\n"
      << "max_norm=" << log.max_norm_seen << "\n";
}

void run_augment(const PipelineConfig& cfg, const LoadedGraph& loaded, const ArtifactPaths& paths,
                 std::ostream& out, std::ostream& err) {
  const Augmenter augmenter(loaded.graph, loaded.hierarchy, cfg.augment);
  std::vector<EntityId> anchors(loaded.graph.entity_count());
  for (EntityId e = 0; e < anchors.size(); ++e) anchors[e] = e;
  const AugmentOutput result = augmenter.all(anchors);
  {
    auto os = open_output(paths.samples_path(cfg));
    write_jsonl(os, loaded.graph, result.records);
  }
  std::size_t positives = 0, truncated = 0;
  for (const auto& r : result.records) {
    positives += r.kind == SampleKind::Positive;
    truncated += r.truncated;
  }
  out << "anchors=" << anchors.size() << "\n"
      << "positives=" << positives << "\n"
      << "negatives=" << result.records.size() - positives << "\n"
      << "truncated_negatives=" << truncated << "\n"
      << "no_candidate=" << result.failures.size() << "\n";
  if (cfg.verbose) {
    for (const auto& f : result.failures) {
      err << "no candidate: anchor '" << loaded.graph.label(f.anchor) << "'";
      if (f.level) err << " level " << *f.level;
      err << ": " << f.reason << "\n";
    }
  }
}

bool run_fuse_check(const PipelineConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  fusion::FuseCheckConfig check;
  check.instances = cfg.check_instances;
  check.seed = cfg.seed;
  const auto results = fusion::run_fuse_check(check);
  fusion::print_results(out, results);
  {
    auto os = open_output(paths.check_path(cfg));
    fusion::print_results(os, results);
  }
  if (paths.write_snapshot) {
    fusion::FusionParams params = fusion::FusionParams::init(cfg.fusion, cfg.seed);
    params.tau = cfg.tau;
    params.lambda_mlm = cfg.lambda_mlm;
    params.lambda_cl = cfg.lambda_cl;
    params.aggregation = cfg.aggregation;
    fs::create_directories(cfg.out_dir);
    fusion::write_snapshot(params, cfg.out_dir / "fusion_params.bin",
                           cfg.out_dir / "fusion_params.json");
  }
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  return ok;
}

}  // namespace

fs::path ArtifactPaths::stats_path(const PipelineConfig& cfg) const {
  return stats_report.value_or(cfg.out_dir / "stats.json");
}
fs::path ArtifactPaths::embeddings_path(const PipelineConfig& cfg) const {
  return embeddings.value_or(cfg.out_dir / "embeddings.tsv");
}
fs::path ArtifactPaths::samples_path(const PipelineConfig& cfg) const {
  return samples.value_or(cfg.out_dir / "samples.jsonl");
}
fs::path ArtifactPaths::check_path(const PipelineConfig& cfg) const {
  return check_report.value_or(cfg.out_dir / "fuse_check.txt");
}

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  if (name == "stats") return Subcommand::Stats;
  if (name == "embed") return Subcommand::Embed;
  if (name == "augment") return Subcommand::Augment;
  if (name == "fuse-check") return Subcommand::FuseCheck;
  if (name == "all") return Subcommand::All;
  return std::nullopt;
}

std::vector<std::string> read_corpus(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw RunError("cannot read corpus '" + path.string() + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto part = tokenize(normalize_label(line));
    tokens.insert(tokens.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return tokens;
}

int run(Subcommand cmd, const PipelineConfig& cfg, const ArtifactPaths& paths, std::ostream& out,
        std::ostream& err) {
  const auto diags = validate_config(cfg);
  for (const auto& d : diags) {
    err << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ") << d.message
        << "\n";
  }
  if (has_errors(diags)) return 1;

  try {
    switch (cmd) {
      case Subcommand::Stats:
        run_stats(cfg, load(cfg, err), paths, out);
        return 0;
      case Subcommand::Embed:
        run_embed(cfg, load_hierarchy(cfg.classes, err, cfg.verbose), paths, out, err);
        return 0;
      case Subcommand::Augment:
        run_augment(cfg, load(cfg, err), paths, out, err);
        return 0;
      case Subcommand::FuseCheck:
        return run_fuse_check(cfg, paths, out) ? 0 : 1;
      case Subcommand::All: {
        const LoadedGraph loaded = load(cfg, err);
        fs::create_directories(cfg.out_dir);
        {
          auto os = open_output(cfg.out_dir / "config.txt");
          write_config(os, cfg);
        }
        run_stats(cfg, loaded, paths, out);
        run_embed(cfg, loaded.hierarchy, paths, out, err);
        run_augment(cfg, loaded, paths, out, err);
        return run_fuse_check(cfg, paths, out) ? 0 : 1;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace kgaug
