#include "kgaug/encoder.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "kgaug/text.hpp"

namespace kgaug::fusion {

EncoderStub::EncoderStub(std::vector<std::string> vocabulary, const EncoderConfig& cfg,
                         std::uint64_t seed)
    : cfg_(cfg) {
  if (cfg.width < 2 || cfg.layers == 0 || cfg.max_positions == 0) {
    throw std::invalid_argument("encoder needs width >= 2, layers >= 1 and max_positions >= 1");
  }
  std::sort(vocabulary.begin(), vocabulary.end());
  vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()), vocabulary.end());
  vocab_.emplace(std::string(kUnknown), 0);
  for (auto& tok : vocabulary) {
    if (tok != kUnknown) vocab_.emplace(std::move(tok), vocab_.size());
  }

  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(cfg.width);
  token_table_ = nn::uniform_init(static_cast<Eigen::Index>(vocab_.size()), d, 1.0, rng);
  position_table_ = nn::uniform_init(static_cast<Eigen::Index>(cfg.max_positions), d, 1.0, rng);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    layers_.push_back(nn::MultiHeadAttention::init(cfg.width, cfg.heads, rng));
  }
}

EncoderStub EncoderStub::for_graph(const KnowledgeGraph& g, const EncoderConfig& cfg,
                                   std::uint64_t seed) {
  std::set<std::string> vocab{std::string(kClsToken), std::string(kSepToken)};
  for (EntityId e = 0; e < g.entity_count(); ++e) {
    for (auto& t : tokenize(g.label(e))) vocab.insert(std::move(t));
  }
  for (RelationId r = 0; r < g.relation_count(); ++r) {
    for (auto& t : tokenize(g.relation_label(r))) vocab.insert(std::move(t));
  }
  return EncoderStub({vocab.begin(), vocab.end()}, cfg, seed);
}

std::size_t EncoderStub::token_id(const std::string& token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? 0 : it->second;
}

nn::Matrix EncoderStub::encode(std::span<const std::string> tokens,
                               std::span<const int> positions) const {
  if (tokens.empty()) throw std::invalid_argument("encode: empty token sequence");
  if (tokens.size() != positions.size()) {
    throw std::invalid_argument("encode: tokens and positions differ in length");
  }
  nn::Matrix x(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(cfg_.width));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (positions[i] < 0 || static_cast<std::size_t>(positions[i]) >= cfg_.max_positions) {
      throw std::invalid_argument("position id " + std::to_string(positions[i]) +
                                  " outside the position table");
    }
    x.row(static_cast<Eigen::Index>(i)) =
        token_table_.row(static_cast<Eigen::Index>(token_id(tokens[i]))) +
        position_table_.row(positions[i]);
  }
  for (const auto& layer : layers_) x = nn::layer_norm(x + layer.forward(x));
  return x;
}

nn::RowVector EncoderStub::summary(std::span<const std::string> tokens,
                                   std::span<const int> positions) const {
  return encode(tokens, positions).row(0);
}

nn::RowVector encode_sample(const EncoderStub& stub, const SampleRecord& record) {
  if (record.tokens.empty()) throw std::invalid_argument("encode_sample: empty record");
  return stub.summary(record.tokens, record.position_index);
}

}  // namespace kgaug::fusion
