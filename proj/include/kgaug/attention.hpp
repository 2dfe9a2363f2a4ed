#pragma once

#include <vector>

#include "kgaug/nn.hpp"

namespace kgaug::nn {

/// Bias-free multi-head self-attention over the rows of X:
/// Y = concat_h(softmax(Q_h K_h^T / sqrt(d_h)) V_h) Wo with Q = X Wq etc.
struct MultiHeadAttention {
  std::size_t heads = 1;
  Matrix wq, wk, wv, wo;  // d x d

  static MultiHeadAttention init(std::size_t width, std::size_t heads, Rng& rng);
  std::size_t width() const { return static_cast<std::size_t>(wq.rows()); }
  void validate(std::size_t width) const;

  struct Cache {
    Matrix x, q, k, v, context;
    std::vector<Matrix> attn;  // per head, s x s
  };

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;

  /// Same-shaped zero parameters, used as a gradient accumulator.
  MultiHeadAttention zeros_like() const;

  /// Accumulates parameter gradients into `grads`; returns dL/dX.
  Matrix backward(const Cache& cache, const Matrix& dy, MultiHeadAttention& grads) const;
};

}  // namespace kgaug::nn
