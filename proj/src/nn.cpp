#include "kgaug/nn.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kgaug::nn {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](double v) { return gelu(v); });
}

Matrix gelu_backward(const Matrix& x, const Matrix& dy) {
  return dy.cwiseProduct(x.unaryExpr([](double v) { return gelu_grad(v); }));
}

Matrix layer_norm(const Matrix& x) {
  if (x.cols() < 2) throw std::invalid_argument("layer_norm needs vectors of length >= 2");
  Matrix y(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (x.row(r).maxCoeff() == x.row(r).minCoeff()) {
      y.row(r).setZero();  // the rounded mean can differ from a constant row by an ulp
      continue;
    }
    const double mean = x.row(r).mean();
    const RowVector centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / n;
    y.row(r) = centered / std::sqrt(var + kLayerNormEps);
  }
  return y;
}

Matrix layer_norm_backward(const Matrix& x, const Matrix& dy) {
  Matrix dx(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const RowVector centered = x.row(r).array() - mean;
    const double inv = 1.0 / std::sqrt(centered.squaredNorm() / n + kLayerNormEps);
    const RowVector y = centered * inv;
    const double mean_dy = dy.row(r).mean();
    const double mean_dy_y = dy.row(r).dot(y) / n;
    dx.row(r) = inv * (dy.row(r).array() - mean_dy - y.array() * mean_dy_y);
  }
  return dx;
}

Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    throw std::invalid_argument("affine: shape mismatch");
  }
  return (x * w).rowwise() + b.row(0);
}

Matrix softmax_rows(const Matrix& s) {
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const RowVector e = (s.row(r).array() - s.row(r).maxCoeff()).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, double fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  // fill in row-major order so the draw sequence does not depend on storage
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(what + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
}

}  // namespace kgaug::nn
