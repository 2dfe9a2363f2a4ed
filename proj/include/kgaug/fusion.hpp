#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgaug/attention.hpp"
#include "kgaug/nn.hpp"

namespace kgaug::fusion {

using nn::Matrix;
using nn::RowVector;

/// Widths: d1 token, d2 class embedding, d3 entity, d4 mixed fusion.
struct FusionDims {
  std::size_t d1 = 768;
  std::size_t d2 = 100;
  std::size_t d3 = 100;
  std::size_t d4 = 768;
  std::size_t layers = 6;  // knowledge injector depth
  std::size_t heads = 12;

  void validate() const;
  /// Reduced widths used by the verification suite.
  static FusionDims desk_scale();
};

/// One knowledge-injector layer. Entities are lifted to the token width for
/// joint attention and projected back afterwards.
struct InjectorLayerParams {
  nn::MultiHeadAttention attention;  // d1
  Matrix entity_in;                  // d3 x d1
  Matrix entity_out;                 // d1 x d3
  Matrix mix_token;                  // d1 x d4
  Matrix mix_entity;                 // d3 x d4
  Matrix mix_bias;                   // 1 x d4
  Matrix regen_token;                // d4 x d1
  Matrix regen_token_bias;           // 1 x d1
  Matrix regen_entity;               // d4 x d3
  Matrix regen_entity_bias;          // 1 x d3

  InjectorLayerParams zeros_like() const;
};

/// How the injector layers combine: fed forward one after another, or
/// evaluated independently on the same input and summed.
enum class Aggregation { Sequential, LiteralSum };

struct FusionParams {
  FusionDims dims;
  Matrix infuse_weight;  // (d2 + d1) x d3, class rows first
  Matrix infuse_bias;    // 1 x d3
  Matrix norm_weight;    // d3 x d3
  Matrix norm_bias;      // 1 x d3
  std::vector<InjectorLayerParams> layers;
  double lambda_mlm = 0.5;
  double lambda_cl = 0.5;
  double tau = 1.0;
  Aggregation aggregation = Aggregation::Sequential;

  /// Uniform +-1/sqrt(fan_in) from a seeded stream.
  static FusionParams init(const FusionDims& dims, std::uint64_t seed);
  FusionParams zeros_like() const;
  /// Throws std::invalid_argument naming the first tensor with a wrong shape.
  void validate() const;
};

/// Every trainable tensor with a stable dotted name, in snapshot order.
std::vector<std::pair<std::string, Matrix*>> named_tensors(FusionParams& p);
std::vector<std::pair<std::string, const Matrix*>> named_tensors(const FusionParams& p);

// ---------------------------------------------------------------------------
// Entity space infusion

struct InfusionCache {
  Matrix input;     // [class | repr]
  Matrix pre_gelu;
  Matrix hidden;
  Matrix pre_norm;
};

/// h_e = LN(gelu([h_c | h_p] W_f + b_f) W_l + b_l), one entity per row.
Matrix entity_space_infusion(const Matrix& class_embedding, const Matrix& entity_repr,
                             const FusionParams& p, InfusionCache* cache = nullptr);
RowVector entity_space_infusion(const RowVector& class_embedding, const RowVector& entity_repr,
                                const FusionParams& p);

/// Accumulates weight gradients into `grads`; returns (d class, d repr).
std::pair<Matrix, Matrix> entity_space_infusion_backward(const InfusionCache& cache,
                                                         const Matrix& dy, const FusionParams& p,
                                                         FusionParams& grads);

// ---------------------------------------------------------------------------
// Knowledge injector

/// Token position each entity is aligned to.
using Alignment = std::vector<std::optional<std::size_t>>;

struct InjectorOutput {
  Matrix attended_entities;  // m x d3
  Matrix attended_tokens;    // n x d1
  Matrix mixed;              // n x d4
  Matrix tokens;             // regenerated, n x d1
  Matrix entities;           // regenerated, m x d3
};

struct InjectorLayerCache {
  Alignment alignment;
  Matrix entities_in;
  Matrix joint;  // [tokens; entities lifted to d1]
  nn::MultiHeadAttention::Cache attention;
  Matrix attended;  // joint + attention(joint)
  Matrix attended_entities;
  Matrix mix_pre;
  Matrix mixed;
  Matrix token_pre;
  Matrix entity_pre;
};

InjectorOutput injector_layer(const Matrix& entities, const Matrix& tokens,
                              const Alignment& alignment, const InjectorLayerParams& p,
                              InjectorLayerCache* cache = nullptr);

/// Backward from gradients on the regenerated tokens and entities. Returns
/// (d entities, d tokens) and accumulates parameter gradients.
std::pair<Matrix, Matrix> injector_layer_backward(const InjectorLayerCache& cache,
                                                  const Matrix& d_tokens,
                                                  const Matrix& d_entities,
                                                  const InjectorLayerParams& p,
                                                  InjectorLayerParams& grads);

struct InjectorStackCache {
  std::vector<InjectorLayerCache> layers;
};

/// All layers of `p` under its aggregation mode. Returns (tokens, entities).
std::pair<Matrix, Matrix> knowledge_injector(const Matrix& entities, const Matrix& tokens,
                                             const Alignment& alignment, const FusionParams& p,
                                             InjectorStackCache* cache = nullptr);
std::pair<Matrix, Matrix> knowledge_injector_backward(const InjectorStackCache& cache,
                                                      const Matrix& d_tokens,
                                                      const Matrix& d_entities,
                                                      const FusionParams& p, FusionParams& grads);

/// Lifts a regenerated entity vector to the token width so it can be compared
/// with token-side vectors, using the last layer's entity lift.
RowVector entity_to_token_space(const RowVector& entity, const FusionParams& p);

// ---------------------------------------------------------------------------
// Losses

double cosine(const RowVector& a, const RowVector& b);

struct ContrastiveItem {
  RowVector anchor;
  RowVector positive;
  std::vector<RowVector> negatives;
};

struct ContrastiveGrads {
  std::vector<RowVector> anchor;
  std::vector<RowVector> positive;
  std::vector<std::vector<RowVector>> negatives;
};

/// Sum over items of -log(e^{cos(a,p)/tau} / (e^{cos(a,p)/tau} + sum_l e^{cos(a,n_l)/tau})).
double info_nce(std::span<const ContrastiveItem> items, double tau,
                ContrastiveGrads* grads = nullptr);
double info_nce(const RowVector& anchor, const RowVector& positive,
                std::span<const RowVector> negatives, double tau);

/// lambda_mlm * l_mlm + lambda_cl * l_cl.
double total_loss(double l_mlm, double l_cl, double lambda_mlm, double lambda_cl);

}  // namespace kgaug::fusion
