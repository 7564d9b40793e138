#pragma once

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <limits>

#include "gpdrift/frac/cross_inner.hpp"
#include "gpdrift/frac/gamma.hpp"
#include "gpdrift/frac/integral.hpp"

// Worst-case measurements of the fractional-integration identities over a
// batch of test functions (columns of F, cell values on `grid`). L2 norms are
// those of the piecewise-constant interpolants.

namespace gpdrift::frac::properties {

namespace detail {

inline Eigen::VectorXd column_norms(const Eigen::MatrixXd& f, double h) {
  return (f.colwise().squaredNorm().transpose() * h).cwiseSqrt();
}

}  // namespace detail

/// max_f ||I^a I^b f - I^{a+b} f|| / ||f||.
inline double semigroup_error(const UniformGrid& grid, double a, double b, const Eigen::MatrixXd& f) {
  const AbelOperator ia(grid, a), ib(grid, b), iab(grid, a + b);
  const Eigen::MatrixXd diff = ia.apply(ib.apply(f)) - iab.apply(f);
  const double h = grid.h();
  return (detail::column_norms(diff, h).array() / detail::column_norms(f, h).array()).maxCoeff();
}

/// min_f <I^a_{0+} f, I^a_{T-} f> / ||f||^2.
inline double positivity_min(const UniformGrid& grid, double a, const Eigen::MatrixXd& f) {
  const Eigen::MatrixXd e = exact_cross_matrix(grid, a);
  const Eigen::MatrixXd ef = e.triangularView<Eigen::Upper>() * f;
  const Eigen::ArrayXd quad = (f.array() * ef.array()).colwise().sum().transpose();
  return (quad / detail::column_norms(f, grid.h()).array().square()).minCoeff();
}

/// max_f |<I^{1/2}_{0+} f, I^{1/2}_{T-} f> - (int f)^2/2| / ((int f)^2/2).
inline double half_identity_error(const UniformGrid& grid, const Eigen::MatrixXd& f) {
  const Eigen::MatrixXd e = exact_cross_matrix(grid, 0.5);
  const Eigen::MatrixXd ef = e.triangularView<Eigen::Upper>() * f;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double lhs = f.col(j).dot(ef.col(j));
    const double integral = grid.h() * f.col(j).sum();
    const double rhs = 0.5 * integral * integral;
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return worst;
}

/// max_f (||I_{0+} f|| + ||I_{T-} f||) / (sqrt2 ||I_{0+} f + I_{T-} f||) - 1 at order 2H-1.
inline double norm_inequality_excess(const UniformGrid& grid, double hurst, const Eigen::MatrixXd& f) {
  const AbelOperator op(grid, 2.0 * hurst - 1.0);
  const Eigen::MatrixXd l = op.apply(f);
  const Eigen::MatrixXd r = op.apply_reflected(f);
  const double h = grid.h();
  const Eigen::ArrayXd lhs = detail::column_norms(l, h).array() + detail::column_norms(r, h).array();
  const Eigen::ArrayXd rhs = std::sqrt(2.0) * detail::column_norms(l + r, h).array();
  return (lhs / rhs).maxCoeff() - 1.0;
}

/// max |<I^a_{0+} f, g> - <f, I^a_{T-} g>| / (||I^a_{0+} f|| ||g||) over paired columns.
inline double adjointness_error(const UniformGrid& grid, double a, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) {
  const AbelOperator op(grid, a);
  const Eigen::MatrixXd lf = op.apply(f);
  const Eigen::MatrixXd rg = op.apply_reflected(g);
  const double h = grid.h();
  const Eigen::VectorXd nl = detail::column_norms(lf, h);
  const Eigen::VectorXd ng = detail::column_norms(g, h);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double lhs = h * lf.col(j).dot(g.col(j));
    const double rhs = h * f.col(j).dot(rg.col(j));
    worst = std::max(worst, std::abs(lhs - rhs) / (nl(j) * ng(j)));
  }
  return worst;
}

/// max_f ||Gamma_H f - H Gamma(2H)(I_{0+} + I_{T-}) f|| / ||Gamma_H f|| at order 2H-1.
inline double operator_identity_error(const UniformGrid& grid, double hurst, const Eigen::MatrixXd& f) {
  const Eigen::MatrixXd g = fbm_gamma_matrix(grid, hurst) * f;
  const AbelOperator op(grid, 2.0 * hurst - 1.0);
  const Eigen::MatrixXd s = hurst * std::tgamma(2.0 * hurst) * (op.apply(f) + op.apply_reflected(f));
  const double h = grid.h();
  return (detail::column_norms(g - s, h).array() / detail::column_norms(g, h).array()).maxCoeff();
}

}  // namespace gpdrift::frac::properties
