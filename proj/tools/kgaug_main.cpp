// Command-line driver: defaults, then --config file values, then flags.

#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgaug/pipeline.hpp"

namespace {

struct FlagBinding {
  std::vector<std::string> keys;  // config keys the flag writes
  CLI::Option* option = nullptr;
  std::string* value = nullptr;
};

class FlagSet {
 public:
  void add(CLI::App* app, const std::string& name, std::vector<std::string> keys,
           const std::string& help) {
    storage_.emplace_back();
    auto* value = &storage_.back();
    bindings_.push_back({std::move(keys), app->add_option(name, *value, help), value});
  }

  void add_switch(CLI::App* app, const std::string& name, std::string key, std::string when_set,
                  const std::string& help) {
    storage_.push_back(std::move(when_set));
    auto* value = &storage_.back();
    bindings_.push_back({{std::move(key)}, app->add_flag(name, help), value});
  }

  void apply(kgaug::PipelineConfig& cfg) const {
    for (const auto& b : bindings_) {
      if (b.option->count() == 0) continue;
      for (const auto& key : b.keys) kgaug::set_config_value(cfg, key, *b.value);
    }
  }

 private:
  std::deque<std::string> storage_;
  std::vector<FlagBinding> bindings_;
};

void add_graph_inputs(FlagSet& flags, CLI::App* sub, bool with_corpus) {
  flags.add(sub, "--kg", {"kg"}, "triples TSV: head<TAB>relation<TAB>tail");
  flags.add(sub, "--classes", {"classes"}, "hierarchy TSV: child<TAB>parent<TAB>ec|cc");
  if (with_corpus) flags.add(sub, "--corpus", {"corpus"}, "plain-text corpus for coverage");
}

void add_stats_flags(FlagSet& flags, CLI::App* sub) {
  flags.add(sub, "--samples", {"stats.samples"}, "density samples (default 100)");
  flags.add(sub, "--node-fraction", {"stats.node_fraction"}, "nodes per density sample (0.10)");
  flags.add(sub, "--match-threshold", {"stats.match_threshold"},
            "prefix tokens needed for a partial entity match (1)");
}

void add_embed_flags(FlagSet& flags, CLI::App* sub) {
  flags.add(sub, "--dim", {"embed.dim", "fusion.d2"}, "embedding dimension, also d2 (100)");
  flags.add(sub, "--epochs", {"embed.epochs"}, "training epochs (300)");
  flags.add(sub, "--lr", {"embed.lr"}, "learning rate (0.3)");
  flags.add(sub, "--neg", {"embed.neg"}, "negatives per example (10)");
  flags.add(sub, "--burn-in", {"embed.burn_in"}, "burn-in epochs at lr/10 (20)");
  flags.add(sub, "--batch", {"embed.batch"}, "examples per step (10)");
}

void add_augment_flags(FlagSet& flags, CLI::App* sub) {
  flags.add(sub, "--K", {"augment.K"}, "neighbor triples per positive (2)");
  flags.add(sub, "--k", {"augment.k"}, "negative levels per anchor (3)");
  flags.add(sub, "--L", {"augment.L"}, "target negative length in tokens (64)");
  flags.add(sub, "--positive-hop", {"augment.positive_hop"}, "hop of positive ends (1)");
  flags.add(sub, "--negative-hop-offset", {"augment.negative_hop_offset"},
            "level n negatives end at hop n + offset (1)");
  flags.add_switch(sub, "--no-same-class", "augment.same_class_preference", "false",
                   "do not prefer end nodes of the anchor's class");
}

void add_fusion_flags(FlagSet& flags, CLI::App* sub) {
  flags.add(sub, "--d1", {"fusion.d1"}, "token width (768)");
  flags.add(sub, "--d2", {"fusion.d2"}, "class embedding width (100)");
  flags.add(sub, "--d3", {"fusion.d3"}, "entity width (100)");
  flags.add(sub, "--d4", {"fusion.d4"}, "mixing width (768)");
  flags.add(sub, "--M", {"fusion.M"}, "injector layers (6)");
  flags.add(sub, "--N", {"fusion.N"}, "encoder layers (5)");
  flags.add(sub, "--heads", {"fusion.heads"}, "attention heads (12)");
  flags.add(sub, "--tau", {"fusion.tau"}, "contrastive temperature (1)");
  flags.add(sub, "--lambda1", {"fusion.lambda1"}, "MLM loss weight (0.5)");
  flags.add(sub, "--lambda2", {"fusion.lambda2"}, "contrastive loss weight (0.5)");
  flags.add(sub, "--aggregation", {"fusion.aggregation"}, "sequential or literal_sum");
  flags.add(sub, "--instances", {"check.instances"}, "random instances per gradient check (20)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-domain knowledge graph analytics, augmentation and fusion checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool verbose = false;
  auto* config_opt = app.add_option("--config", config_path, "key = value config file");
  auto* seed_opt = app.add_option("--seed", seed, "seed for every stochastic step (42)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (out)");
  app.add_flag("--verbose", verbose, "log progress and per-anchor failures to stderr");

  FlagSet flags;
  std::string sub_out;
  bool snapshot = false;

  auto* stats = app.add_subcommand("stats", "structural indicators of the graph");
  add_graph_inputs(flags, stats, true);
  add_stats_flags(flags, stats);
  stats->add_option("--out", sub_out, "JSON report path");

  auto* embed = app.add_subcommand("embed", "Poincare-ball embeddings of the class hierarchy");
  flags.add(embed, "--classes", {"classes"}, "hierarchy TSV: child<TAB>parent<TAB>ec|cc");
  add_embed_flags(flags, embed);
  embed->add_option("--out", sub_out, "embedding TSV path (header written to <path>.header)");

  auto* augment = app.add_subcommand("augment", "positive and multi-level negative samples");
  add_graph_inputs(flags, augment, false);
  add_augment_flags(flags, augment);
  augment->add_option("--out", sub_out, "samples JSONL path");

  auto* check = app.add_subcommand("fuse-check", "fusion and loss invariants with gradient checks");
  add_fusion_flags(flags, check);
  check->add_option("--out", sub_out, "report path");
  check->add_flag("--snapshot", snapshot,
                  "also write initialized fusion parameters to the output directory");

  auto* all = app.add_subcommand("all", "stats, embed, augment and fuse-check into --out");
  add_graph_inputs(flags, all, true);
  add_stats_flags(flags, all);
  add_embed_flags(flags, all);
  add_augment_flags(flags, all);
  add_fusion_flags(flags, all);

  CLI11_PARSE(app, argc, argv);

  kgaug::PipelineConfig cfg;
  try {
    if (config_opt->count() > 0) kgaug::apply_config_file(cfg, config_path);
    if (seed_opt->count() > 0) cfg.apply_seed(seed);
    if (out_opt->count() > 0) cfg.out_dir = out_dir;
    if (verbose) cfg.verbose = true;
    flags.apply(cfg);
  } catch (const kgaug::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  kgaug::ArtifactPaths paths;
  paths.write_snapshot = snapshot;
  const auto* chosen = app.get_subcommands().front();
  const auto cmd = kgaug::parse_subcommand(chosen->get_name());
  if (!sub_out.empty()) {
    switch (*cmd) {
      case kgaug::Subcommand::Stats: paths.stats_report = sub_out; break;
      case kgaug::Subcommand::Embed: paths.embeddings = sub_out; break;
      case kgaug::Subcommand::Augment: paths.samples = sub_out; break;
      case kgaug::Subcommand::FuseCheck: paths.check_report = sub_out; break;
      case kgaug::Subcommand::All: break;
    }
  }
  return kgaug::run(*cmd, cfg, paths, std::cout, std::cerr);
}
