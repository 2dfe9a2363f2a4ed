#include "kgaug/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace kgaug::nn {

MultiHeadAttention MultiHeadAttention::init(std::size_t width, std::size_t heads, Rng& rng) {
  if (heads == 0 || width % heads != 0) {
    throw std::invalid_argument("attention width " + std::to_string(width) +
                                " is not divisible by " + std::to_string(heads) + " heads");
  }
  const auto d = static_cast<Eigen::Index>(width);
  const auto fan = static_cast<double>(width);
  MultiHeadAttention a;
  a.heads = heads;
  a.wq = uniform_init(d, d, fan, rng);
  a.wk = uniform_init(d, d, fan, rng);
  a.wv = uniform_init(d, d, fan, rng);
  a.wo = uniform_init(d, d, fan, rng);
  return a;
}

void MultiHeadAttention::validate(std::size_t width) const {
  const auto d = static_cast<Eigen::Index>(width);
  check_shape(wq, d, d, "attention Wq");
  check_shape(wk, d, d, "attention Wk");
  check_shape(wv, d, d, "attention Wv");
  check_shape(wo, d, d, "attention Wo");
  if (heads == 0 || width % heads != 0) {
    throw std::invalid_argument("attention width not divisible by head count");
  }
}

Matrix MultiHeadAttention::forward(const Matrix& x, Cache* cache) const {
  if (x.cols() != wq.rows()) throw std::invalid_argument("attention: input width mismatch");
  const Eigen::Index dh = wq.rows() / static_cast<Eigen::Index>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix q = x * wq;
  Matrix k = x * wk;
  Matrix v = x * wv;
  Matrix context(x.rows(), x.cols());
  std::vector<Matrix> attn;
  attn.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(h) * dh;
    Matrix a = softmax_rows(scale * q.middleCols(c0, dh) * k.middleCols(c0, dh).transpose());
    context.middleCols(c0, dh) = a * v.middleCols(c0, dh);
    attn.push_back(std::move(a));
  }
  Matrix y = context * wo;
  if (cache) {
    cache->x = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->context = std::move(context);
    cache->attn = std::move(attn);
  }
  return y;
}

MultiHeadAttention MultiHeadAttention::zeros_like() const {
  MultiHeadAttention z;
  z.heads = heads;
  z.wq = Matrix::Zero(wq.rows(), wq.cols());
  z.wk = Matrix::Zero(wk.rows(), wk.cols());
  z.wv = Matrix::Zero(wv.rows(), wv.cols());
  z.wo = Matrix::Zero(wo.rows(), wo.cols());
  return z;
}

Matrix MultiHeadAttention::backward(const Cache& cache, const Matrix& dy,
                                    MultiHeadAttention& grads) const {
  const Eigen::Index dh = wq.rows() / static_cast<Eigen::Index>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  grads.wo += cache.context.transpose() * dy;
  const Matrix dcontext = dy * wo.transpose();
  Matrix dq = Matrix::Zero(cache.q.rows(), cache.q.cols());
  Matrix dk = Matrix::Zero(cache.k.rows(), cache.k.cols());
  Matrix dv = Matrix::Zero(cache.v.rows(), cache.v.cols());
  for (std::size_t h = 0; h < heads; ++h) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(h) * dh;
    const Matrix& a = cache.attn[h];
    const Matrix dctx = dcontext.middleCols(c0, dh);
    const Matrix da = dctx * cache.v.middleCols(c0, dh).transpose();
    dv.middleCols(c0, dh) = a.transpose() * dctx;
    // softmax backward, row by row
    const Eigen::VectorXd row_dot = (da.cwiseProduct(a)).rowwise().sum();
    const Matrix ds = scale * a.cwiseProduct(da.colwise() - row_dot);
    dq.middleCols(c0, dh) = ds * cache.k.middleCols(c0, dh);
    dk.middleCols(c0, dh) = ds.transpose() * cache.q.middleCols(c0, dh);
  }
  grads.wq += cache.x.transpose() * dq;
  grads.wk += cache.x.transpose() * dk;
  grads.wv += cache.x.transpose() * dv;
  return dq * wq.transpose() + dk * wk.transpose() + dv * wv.transpose();
}

}  // namespace kgaug::nn
