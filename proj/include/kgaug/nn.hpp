#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "kgaug/rng.hpp"

namespace kgaug::nn {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Guard added to the variance so constant inputs normalize to zeros.
inline constexpr double kLayerNormEps = 1e-12;

/// Exact GELU: x * Phi(x).
double gelu(double x);
double gelu_grad(double x);
Matrix gelu(const Matrix& x);
/// dL/dx given dL/dy and the pre-activation x.
Matrix gelu_backward(const Matrix& x, const Matrix& dy);

/// Row-wise (x - mean) / sqrt(var + eps), no affine part. Rows need >= 2 columns.
Matrix layer_norm(const Matrix& x);
Matrix layer_norm_backward(const Matrix& x, const Matrix& dy);

/// x * W + 1 b, where x holds one item per row.
Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b);

/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& s);

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Uniform in +-1/sqrt(fan_in).
Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, double fan_in, Rng& rng);

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what);

}  // namespace kgaug::nn
