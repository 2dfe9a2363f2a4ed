#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgaug/attention.hpp"
#include "kgaug/augment.hpp"
#include "kgaug/graph.hpp"

namespace kgaug::fusion {

struct EncoderConfig {
  std::size_t width = 768;  // d1
  std::size_t layers = 5;
  std::size_t heads = 12;
  std::size_t max_positions = 512;
};

/// Small deterministic text encoder standing in for a pretrained one: token
/// and position embeddings followed by post-norm residual self-attention
/// layers. The first row of the output is the sequence summary.
class EncoderStub {
 public:
  static constexpr std::string_view kUnknown = "[UNK]";

  EncoderStub(std::vector<std::string> vocabulary, const EncoderConfig& cfg, std::uint64_t seed);

  /// Vocabulary: every token of every entity and relation label, plus the
  /// record markers.
  static EncoderStub for_graph(const KnowledgeGraph& g, const EncoderConfig& cfg,
                               std::uint64_t seed);

  std::size_t width() const { return cfg_.width; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  std::size_t token_id(const std::string& token) const;

  nn::Matrix encode(std::span<const std::string> tokens, std::span<const int> positions) const;
  nn::RowVector summary(std::span<const std::string> tokens, std::span<const int> positions) const;

 private:
  EncoderConfig cfg_;
  std::unordered_map<std::string, std::size_t> vocab_;
  nn::Matrix token_table_;
  nn::Matrix position_table_;
  std::vector<nn::MultiHeadAttention> layers_;
};

/// Runs the stub with the record's position indices as position ids and
/// returns the first-token summary.
nn::RowVector encode_sample(const EncoderStub& stub, const SampleRecord& record);

}  // namespace kgaug::fusion
