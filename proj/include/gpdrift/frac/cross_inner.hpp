#pragma once

#include <cmath>

#include "gpdrift/frac/grid_function.hpp"
#include "gpdrift/frac/integral.hpp"

namespace gpdrift::frac {

/// Matrix E with <I^alpha_{0+} f, I^alpha_{T-} g> = f^T E g in L2[0,T] for the
/// piecewise-constant functions with cell values f and g. Upper triangular Toeplitz:
///   E_{i,i+k} = h^{2a+1}/Gamma(2a+2) [(k+1)^{2a+1} - 2k^{2a+1} + (k-1)_+^{2a+1}].
inline Eigen::MatrixXd exact_cross_matrix(const UniformGrid& grid, double alpha) {
  detail::check_order(alpha, true);
  const auto n = grid.size();
  const double q = 2.0 * alpha + 1.0;
  const double scale = std::pow(grid.h(), q) / std::tgamma(q + 1.0);
  Eigen::VectorXd e(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    e(k) = scale * (std::pow(kd + 1.0, q) - 2.0 * std::pow(kd, q) + (k >= 1 ? std::pow(kd - 1.0, q) : 0.0));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) m(i, j) = e(j - i);
  }
  return m;
}

/// <I^alpha_{0+} f, I^alpha_{T-} g>, evaluated exactly for the piecewise-constant interpolants.
inline double exact_cross_inner(const GridFunction& f, const GridFunction& g, double alpha) {
  if (!(f.grid() == g.grid())) throw AlignmentError("cross inner product needs a common grid");
  return f.values().dot(exact_cross_matrix(f.grid(), alpha).triangularView<Eigen::Upper>() * g.values());
}

}  // namespace gpdrift::frac
