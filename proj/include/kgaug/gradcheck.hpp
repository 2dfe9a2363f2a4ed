#pragma once

#include <functional>

#include <Eigen/Core>

namespace kgaug::gradcheck {

/// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

/// Central differences of `f` with respect to every entry of `x`, which is
/// perturbed in place and restored.
template <typename Derived>
Eigen::VectorXd central_difference(const std::function<double()>& f,
                                   Eigen::MatrixBase<Derived>& x, double step) {
  Eigen::VectorXd grad(x.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c, ++k) {
      const double saved = x(r, c);
      x(r, c) = saved + step;
      const double up = f();
      x(r, c) = saved - step;
      const double down = f();
      x(r, c) = saved;
      grad(k) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

/// Row-major flattening matching central_difference's visiting order.
template <typename Derived>
Eigen::VectorXd flatten(const Eigen::MatrixBase<Derived>& x) {
  Eigen::VectorXd out(x.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) out(k++) = x(r, c);
  }
  return out;
}

}  // namespace kgaug::gradcheck
