#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "gpdrift/frac/integral.hpp"

namespace gpdrift::frac {

enum class ResidualNorm { max, l2 };

/// Re-integration check applied after every fractional derivative.
struct DerivativeCheck {
  bool enabled = true;
  /// Allowed interior residual relative to the interior norm of f.
  double tolerance = 1e-2;
  ResidualNorm norm = ResidualNorm::max;
};

namespace detail {

/// d/dx of g where g ~ x^c psi with psi smooth: x^{c-1}(c psi + x psi').
/// Centered differences on psi, one-sided at the two boundary cells.
/// Operates column-wise.
inline Eigen::MatrixXd differentiate_with_power(const Eigen::MatrixXd& g, const Eigen::VectorXd& x,
                                                double h, double c) {
  const Eigen::Index n = g.rows();
  if (n < 3) throw ParameterError("fractional derivative needs at least 3 cells");
  const Eigen::ArrayXd xc = x.array().pow(c);
  const Eigen::ArrayXd xcm1 = x.array().pow(c - 1.0);
  Eigen::MatrixXd psi = (g.array().colwise() / xc).matrix();
  Eigen::MatrixXd dpsi(n, g.cols());
  dpsi.row(0) = (psi.row(1) - psi.row(0)) / h;
  dpsi.row(n - 1) = (psi.row(n - 1) - psi.row(n - 2)) / h;
  dpsi.middleRows(1, n - 2) = (psi.bottomRows(n - 2) - psi.topRows(n - 2)) / (2.0 * h);
  Eigen::MatrixXd out = c * psi + (dpsi.array().colwise() * x.array()).matrix();
  return (out.array().colwise() * xcm1).matrix();
}

inline double interior_norm(const Eigen::VectorXd& v, ResidualNorm norm) {
  const auto [lo, hi] = interior_range(static_cast<std::size_t>(v.size()));
  const auto seg = v.segment(lo, hi - lo);
  return norm == ResidualNorm::max ? seg.cwiseAbs().maxCoeff() : seg.norm();
}

}  // namespace detail

/// Column-wise D^alpha_{0+} = (d/dx) I^{1-alpha}_{0+} for functions sharing one
/// left exponent. Keeps the two Abel matrices so repeated calls are cheap.
class LeftDerivative {
 public:
  LeftDerivative(UniformGrid grid, double alpha, double left_exponent = 0.0, DerivativeCheck check = {})
      : grid_(grid), alpha_(alpha), exponent_(left_exponent), check_(check),
        integrate_(grid, 1.0 - alpha, left_exponent), x_(grid.nodes()) {
    detail::check_order(alpha, false);
    if (!(exponent_ - alpha_ > -1.0)) {
      throw NonSolvableError("fractional derivative of a function with left exponent " + std::to_string(exponent_) +
                                 " is not integrable at 0",
                             std::numeric_limits<double>::infinity());
    }
    if (check_.enabled) reintegrate_.emplace(grid, alpha, exponent_ - alpha_);
  }

  double alpha() const noexcept { return alpha_; }
  double input_exponent() const noexcept { return exponent_; }
  double output_exponent() const noexcept { return exponent_ - alpha_; }

  /// Columns of f -> columns of D^alpha f. Throws NonSolvableError naming the
  /// first column whose re-integration misses f.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& f) const {
    const Eigen::MatrixXd g = integrate_.apply(f);
    Eigen::MatrixXd d = detail::differentiate_with_power(g, x_, grid_.h(), exponent_ + 1.0 - alpha_);
    if (check_.enabled) verify(f, d);
    return d;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    return apply(Eigen::MatrixXd(f)).col(0);
  }

  /// Largest relative re-integration residual over the columns.
  double residual(const Eigen::MatrixXd& f, const Eigen::MatrixXd& d) const {
    const AbelOperator& back = reintegrate_ ? *reintegrate_ : AbelOperator(grid_, alpha_, exponent_ - alpha_);
    const Eigen::MatrixXd r = back.apply(d) - f;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      const double scale = detail::interior_norm(f.col(j), check_.norm);
      const double res = detail::interior_norm(r.col(j), check_.norm);
      worst = std::max(worst, scale > 0.0 ? res / scale : res);
    }
    return worst;
  }

 private:
  void verify(const Eigen::MatrixXd& f, const Eigen::MatrixXd& d) const {
    const Eigen::MatrixXd r = reintegrate_->apply(d) - f;
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      const double scale = detail::interior_norm(f.col(j), check_.norm);
      const double res = detail::interior_norm(r.col(j), check_.norm);
      const double rel = scale > 0.0 ? res / scale : res;
      if (!(rel <= check_.tolerance)) {
        std::ostringstream msg;
        msg << "I^" << alpha_ << " D^" << alpha_ << " f misses f by " << rel << " (tolerance " << check_.tolerance
            << ") in column " << j << "; f is not an Abel image at this resolution";
        throw NonSolvableError(msg.str(), rel);
      }
    }
  }

  UniformGrid grid_;
  double alpha_;
  double exponent_;
  DerivativeCheck check_;
  AbelOperator integrate_;
  std::optional<AbelOperator> reintegrate_;
  Eigen::VectorXd x_;
};

inline GridFunction frac_derivative_left(const GridFunction& f, double alpha, DerivativeCheck check = {}) {
  const LeftDerivative op(f.grid(), alpha, f.left_exponent(), check);
  std::optional<EndpointExponents> s;
  if (f.singularity()) s = EndpointExponents{op.output_exponent(), f.right_exponent(), f.singularity()->heuristic};
  else if (op.output_exponent() != 0.0) s = EndpointExponents{op.output_exponent(), 0.0, false};
  return GridFunction(f.grid(), op.apply(f.values()), s);
}

/// D^alpha_{T-} = -(d/dx) I^{1-alpha}_{T-}, evaluated as R D^alpha_{0+} R.
inline GridFunction frac_derivative_right(const GridFunction& f, double alpha, DerivativeCheck check = {}) {
  return frac_derivative_left(f.reflect(), alpha, check).reflect();
}

}  // namespace gpdrift::frac
