#pragma once

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "gpdrift/frac/derivative.hpp"
#include "gpdrift/frac/gamma.hpp"

namespace gpdrift::frac {

/// Matrix of y -> int_0^b y(s)|t-s|^{-p} ds (cellwise-constant y).
/// This is the fBm operator with H = 1 - p/2 divided by H(2H-1).
inline Eigen::MatrixXd power_kernel_matrix(const UniformGrid& grid, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("power kernel exponent p must lie in (0,1)");
  const double hurst = 1.0 - 0.5 * p;
  return fbm_gamma_matrix(grid, hurst) / (hurst * (2.0 * hurst - 1.0));
}

/// Solver of int_0^b y(s)|t-s|^{-p} ds = f(t) via
///   y = Gamma(p)cos(pi p/2)/pi * x^{-a} D^a_{b-}( x^{1-p} D^a_{0+}( f x^{-a} ) ),  a = (1-p)/2,
/// symmetrized as (S f + R S R f)/2 so that reflection-symmetric data give
/// reflection-symmetric solutions on the grid.
class PowerKernelSolver {
 public:
  PowerKernelSolver(UniformGrid grid, double p, DerivativeCheck check = {})
      : grid_(grid), p_(p), a_(0.5 * (1.0 - p)), check_(check), x_(grid.nodes()) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("power kernel exponent p must lie in (0,1)");
    constant_ = std::tgamma(p) * std::cos(boost::math::constants::half_pi<double>() * p) /
                boost::math::constants::pi<double>();
    x_minus_a_ = x_.array().pow(-a_);
    x_one_minus_p_ = x_.array().pow(1.0 - p_);
    // Regular data (exponent 0 at both ends) is the common case; build it up front.
    derivative(-a_);
    derivative(0.0);
  }

  const UniformGrid& grid() const noexcept { return grid_; }
  double p() const noexcept { return p_; }

  /// Solves for every column of f. left/right are the endpoint exponents of the data.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& f, double left = 0.0, double right = 0.0) const {
    if (f.rows() != grid_.size()) throw AlignmentError("power kernel data length differs from the grid");
    const Eigen::MatrixXd direct = one_sided(f, left, right);
    const Eigen::MatrixXd mirrored = one_sided(Eigen::MatrixXd(f.colwise().reverse()), right, left);
    return 0.5 * (direct + Eigen::MatrixXd(mirrored.colwise().reverse()));
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& f, double left = 0.0, double right = 0.0) const {
    return solve(Eigen::MatrixXd(f), left, right).col(0);
  }

 private:
  Eigen::MatrixXd one_sided(const Eigen::MatrixXd& f, double left, double right) const {
    // u = D^a_{0+}(f x^{-a}); exponent left - 2a at 0.
    const Eigen::MatrixXd u = derivative(left - a_).apply(Eigen::MatrixXd(f.array().colwise() * x_minus_a_));
    // v = x^{1-p} u has exponent `left` at 0 and `right` at b.
    const Eigen::MatrixXd v = (u.array().colwise() * x_one_minus_p_).matrix();
    // D^a_{b-} v = R D^a_{0+} R v.
    const Eigen::MatrixXd r =
        derivative(right).apply(Eigen::MatrixXd(v.colwise().reverse())).colwise().reverse();
    return constant_ * (r.array().colwise() * x_minus_a_).matrix();
  }

  const LeftDerivative& derivative(double exponent) const {
    const std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(exponent);
    if (it == cache_.end()) {
      it = cache_.emplace(exponent, std::make_shared<LeftDerivative>(grid_, a_, exponent, check_)).first;
    }
    return *it->second;
  }

  UniformGrid grid_;
  double p_;
  double a_;
  DerivativeCheck check_;
  Eigen::VectorXd x_;
  Eigen::ArrayXd x_minus_a_;
  Eigen::ArrayXd x_one_minus_p_;
  double constant_ = 0.0;
  mutable std::map<double, std::shared_ptr<const LeftDerivative>> cache_;
  mutable std::mutex mutex_;
};

/// Solution of int_0^b y(s)|t-s|^{-p} ds = f(t) on f's grid (b = T of the grid).
inline GridFunction power_kernel_solve(const GridFunction& f, double p, double b, DerivativeCheck check = {}) {
  if (std::abs(b - f.grid().T) > 1e-12 * b) throw AlignmentError("power kernel interval differs from the grid");
  const PowerKernelSolver solver(f.grid(), p, check);
  const Eigen::VectorXd y = solver.solve(f.values(), f.left_exponent(), f.right_exponent());
  const Eigen::VectorXd& v = f.values();
  const bool constant = (v.array() == v(0)).all();
  const double e = -0.5 * (1.0 - p);
  return GridFunction(f.grid(), y, EndpointExponents{e, e, !constant});
}

}  // namespace gpdrift::frac
