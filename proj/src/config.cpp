#include "kgaug/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

namespace kgaug {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

template <typename T, typename Field>
Setter number(Field field) {
  return [field](PipelineConfig& c, const std::string& k, const std::string& v) {
    field(c) = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"kg", [](auto& c, auto&, auto& v) { c.kg = v; }},
      {"classes", [](auto& c, auto&, auto& v) { c.classes = v; }},
      {"corpus", [](auto& c, auto&, auto& v) { c.corpus = v; }},
      {"out", [](auto& c, auto&, auto& v) { c.out_dir = v; }},
      {"seed", [](auto& c, auto& k, auto& v) { c.apply_seed(parse_number<std::uint64_t>(k, v)); }},
      {"verbose", [](auto& c, auto& k, auto& v) { c.verbose = parse_bool(k, v); }},
      {"stats.samples", number<std::size_t>([](auto& c) -> auto& { return c.stats.density.samples; })},
      {"stats.node_fraction", number<double>([](auto& c) -> auto& { return c.stats.density.node_fraction; })},
      {"stats.match_threshold", number<std::size_t>([](auto& c) -> auto& { return c.stats.match_threshold; })},
      {"embed.dim", number<std::size_t>([](auto& c) -> auto& { return c.embed.dim; })},
      {"embed.lr", number<double>([](auto& c) -> auto& { return c.embed.lr; })},
      {"embed.epochs", number<std::size_t>([](auto& c) -> auto& { return c.embed.epochs; })},
      {"embed.neg", number<std::size_t>([](auto& c) -> auto& { return c.embed.neg_count; })},
      {"embed.burn_in", number<std::size_t>([](auto& c) -> auto& { return c.embed.burn_in_epochs; })},
      {"embed.batch", number<std::size_t>([](auto& c) -> auto& { return c.embed.batch_size; })},
      {"embed.ball_margin", number<double>([](auto& c) -> auto& { return c.embed.ball_margin; })},
      {"augment.K", number<std::size_t>([](auto& c) -> auto& { return c.augment.K; })},
      {"augment.k", number<std::size_t>([](auto& c) -> auto& { return c.augment.k; })},
      {"augment.L", number<std::size_t>([](auto& c) -> auto& { return c.augment.L; })},
      {"augment.same_class_preference",
       [](auto& c, auto& k, auto& v) { c.augment.same_class_preference = parse_bool(k, v); }},
      {"augment.positive_hop", number<std::size_t>([](auto& c) -> auto& { return c.augment.positive_hop; })},
      {"augment.negative_hop_offset",
       number<std::size_t>([](auto& c) -> auto& { return c.augment.negative_hop_offset; })},
      {"fusion.d1", number<std::size_t>([](auto& c) -> auto& { return c.fusion.d1; })},
      {"fusion.d2", number<std::size_t>([](auto& c) -> auto& { return c.fusion.d2; })},
      {"fusion.d3", number<std::size_t>([](auto& c) -> auto& { return c.fusion.d3; })},
      {"fusion.d4", number<std::size_t>([](auto& c) -> auto& { return c.fusion.d4; })},
      {"fusion.M", number<std::size_t>([](auto& c) -> auto& { return c.fusion.layers; })},
      {"fusion.heads", number<std::size_t>([](auto& c) -> auto& { return c.fusion.heads; })},
      {"fusion.N", number<std::size_t>([](auto& c) -> auto& { return c.encoder_layers; })},
      {"fusion.tau", number<double>([](auto& c) -> auto& { return c.tau; })},
      {"fusion.lambda1", number<double>([](auto& c) -> auto& { return c.lambda_mlm; })},
      {"fusion.lambda2", number<double>([](auto& c) -> auto& { return c.lambda_cl; })},
      {"fusion.aggregation",
       [](auto& c, auto& k, auto& v) {
         if (v == "sequential") {
           c.aggregation = fusion::Aggregation::Sequential;
         } else if (v == "literal_sum") {
           c.aggregation = fusion::Aggregation::LiteralSum;
         } else {
           throw ConfigError("invalid value '" + v + "' for " + k +
                             " (expected sequential or literal_sum)");
         }
       }},
      {"check.instances", number<std::size_t>([](auto& c) -> auto& { return c.check_instances; })},
  };
  return table;
}

}  // namespace

void PipelineConfig::apply_seed(std::uint64_t s) {
  seed = s;
  stats.density.seed = s;
  embed.seed = s;
  augment.seed = s;
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

void apply_config_text(PipelineConfig& cfg, std::istream& in, const std::string& name) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  apply_config_text(cfg, in, path.filename().string());
}

void write_config(std::ostream& os, const PipelineConfig& c) {
  const auto old = os.precision(17);
  os << "kg = " << c.kg.string() << "\n"
     << "classes = " << c.classes.string() << "\n"
     << "corpus = " << c.corpus.string() << "\n"
     << "out = " << c.out_dir.string() << "\n"
     << "seed = " << c.seed << "\n"
     << "stats.samples = " << c.stats.density.samples << "\n"
     << "stats.node_fraction = " << c.stats.density.node_fraction << "\n"
     << "stats.match_threshold = " << c.stats.match_threshold << "\n"
     << "embed.dim = " << c.embed.dim << "\n"
     << "embed.lr = " << c.embed.lr << "\n"
     << "embed.epochs = " << c.embed.epochs << "\n"
     << "embed.neg = " << c.embed.neg_count << "\n"
     << "embed.burn_in = " << c.embed.burn_in_epochs << "\n"
     << "embed.batch = " << c.embed.batch_size << "\n"
     << "embed.ball_margin = " << c.embed.ball_margin << "\n"
     << "augment.K = " << c.augment.K << "\n"
     << "augment.k = " << c.augment.k << "\n"
     << "augment.L = " << c.augment.L << "\n"
     << "augment.same_class_preference = " << (c.augment.same_class_preference ? "true" : "false")
     << "\n"
     << "augment.positive_hop = " << c.augment.positive_hop << "\n"
     << "augment.negative_hop_offset = " << c.augment.negative_hop_offset << "\n"
     << "fusion.d1 = " << c.fusion.d1 << "\n"
     << "fusion.d2 = " << c.fusion.d2 << "\n"
     << "fusion.d3 = " << c.fusion.d3 << "\n"
     << "fusion.d4 = " << c.fusion.d4 << "\n"
     << "fusion.M = " << c.fusion.layers << "\n"
     << "fusion.heads = " << c.fusion.heads << "\n"
     << "fusion.N = " << c.encoder_layers << "\n"
     << "fusion.tau = " << c.tau << "\n"
     << "fusion.lambda1 = " << c.lambda_mlm << "\n"
     << "fusion.lambda2 = " << c.lambda_cl << "\n"
     << "fusion.aggregation = "
     << (c.aggregation == fusion::Aggregation::Sequential ? "sequential" : "literal_sum") << "\n"
     << "check.instances = " << c.check_instances << "\n";
  os.precision(old);
}

std::vector<Diagnostic> validate_config(const PipelineConfig& cfg) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) {
    out.push_back({Diagnostic::Severity::Error, std::move(msg)});
  };
  auto guard = [&](auto&& check) {
    try {
      check();
    } catch (const std::exception& e) {
      error(e.what());
    }
  };

  if (cfg.stats.density.samples == 0) error("stats.samples must be positive");
  if (!(cfg.stats.density.node_fraction > 0.0 && cfg.stats.density.node_fraction <= 1.0)) {
    error("stats.node_fraction must lie in (0, 1]");
  }
  if (cfg.stats.match_threshold == 0) error("stats.match_threshold must be positive");
  guard([&] { cfg.embed.validate(); });
  guard([&] { cfg.fusion.validate(); });
  if (cfg.encoder_layers == 0) error("fusion.N (encoder layers) must be positive");
  if (!(cfg.tau > 0.0)) error("fusion.tau must be positive, got " + std::to_string(cfg.tau));
  if (cfg.embed.dim != cfg.fusion.d2) {
    error("infusion input shape mismatch: class embeddings have embed.dim=" +
          std::to_string(cfg.embed.dim) + " but the infusion weight expects d2=" +
          std::to_string(cfg.fusion.d2) + " rows of the (d2+d1) x d3 = (" +
          std::to_string(cfg.fusion.d2) + "+" + std::to_string(cfg.fusion.d1) + ") x " +
          std::to_string(cfg.fusion.d3) + " matrix");
  }
  if (cfg.check_instances == 0) error("check.instances must be positive");
  auto levels = validate_level_config(cfg.augment);
  out.insert(out.end(), levels.begin(), levels.end());
  return out;
}

}  // namespace kgaug
