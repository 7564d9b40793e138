#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "gpdrift/frac/grid_function.hpp"

namespace gpdrift::frac {

namespace detail {

inline void check_order(double alpha, bool allow_one) {
  const bool ok = allow_one ? (alpha > 0.0 && alpha <= 1.0) : (alpha > 0.0 && alpha < 1.0);
  if (!ok) {
    throw ParameterError(std::string("fractional order must lie in ") + (allow_one ? "(0,1]" : "(0,1)") +
                         ", got " + std::to_string(alpha));
  }
}

}  // namespace detail

/// Matrix of I^alpha_{0+} on a midpoint grid by product integration.
///
/// On cell j the integrand is taken as f_j (s/x_j)^e, where e is the known
/// left exponent of f, and the kernel (x_i - s)^{alpha-1}/Gamma(alpha) is
/// integrated against it exactly. e = 0 gives the Toeplitz collocation weights
/// h^alpha [(k+1/2)^alpha - (k-1/2)^alpha] / Gamma(alpha+1).
class AbelOperator {
 public:
  AbelOperator(UniformGrid grid, double alpha, double left_exponent = 0.0)
      : grid_(grid), alpha_(alpha), exponent_(left_exponent) {
    detail::check_order(alpha, true);
    if (!(left_exponent > -1.0)) throw ParameterError("left exponent must exceed -1");
    matrix_ = exponent_ == 0.0 ? toeplitz() : singular();
  }

  const UniformGrid& grid() const noexcept { return grid_; }
  double alpha() const noexcept { return alpha_; }
  double exponent() const noexcept { return exponent_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& f) const {
    return matrix_.triangularView<Eigen::Lower>() * f;
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    return matrix_.triangularView<Eigen::Lower>() * f;
  }

  /// The same operator taken from the right end: R A R with R the reversal.
  Eigen::MatrixXd apply_reflected(const Eigen::MatrixXd& f) const {
    return apply(Eigen::MatrixXd(f.colwise().reverse())).colwise().reverse();
  }

 private:
  Eigen::MatrixXd toeplitz() const {
    const auto n = grid_.size();
    const double scale = std::pow(grid_.h(), alpha_) / std::tgamma(alpha_ + 1.0);
    Eigen::VectorXd w(n);
    w(0) = std::pow(0.5, alpha_) * scale;
    for (Eigen::Index k = 1; k < n; ++k) {
      const double kd = static_cast<double>(k);
      w(k) = (std::pow(kd + 0.5, alpha_) - std::pow(kd - 0.5, alpha_)) * scale;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = w(i - j);
    }
    return m;
  }

  // W_ij = x_i^{alpha+e} [B(d/x_i; e+1, alpha) - B(c/x_i; e+1, alpha)] / (Gamma(alpha) x_j^e)
  // over the part [c, d] of cell j left of x_i. Only ratios of grid indices enter,
  // so the h-dependence is the single factor h^alpha.
  Eigen::MatrixXd singular() const {
    using boost::math::beta;
    const auto n = grid_.size();
    const double a = exponent_ + 1.0;
    const double b = alpha_;
    const double scale = std::pow(grid_.h(), alpha_) / std::tgamma(alpha_);
    const double complete = beta(a, b);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> edge(static_cast<std::size_t>(n) + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = static_cast<double>(i) + 0.5;
      for (Eigen::Index j = 0; j <= i; ++j) edge[static_cast<std::size_t>(j)] = beta(a, b, static_cast<double>(j) / xi);
      edge[static_cast<std::size_t>(i) + 1] = complete;
      const double front = std::pow(xi, alpha_ + exponent_);
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double xj = static_cast<double>(j) + 0.5;
        const auto js = static_cast<std::size_t>(j);
        m(i, j) = scale * front * (edge[js + 1] - edge[js]) / std::pow(xj, exponent_);
      }
    }
    return m;
  }

  UniformGrid grid_;
  double alpha_;
  double exponent_;
  Eigen::MatrixXd matrix_;
};

namespace detail {

inline std::optional<EndpointExponents> integrated_exponents(const GridFunction& f, double alpha) {
  if (!f.singularity()) return std::nullopt;
  const auto& s = *f.singularity();
  return EndpointExponents{std::min(0.0, s.left + alpha), std::min(0.0, s.right + alpha), s.heuristic};
}

}  // namespace detail

/// I^alpha_{0+} f, alpha in (0,1].
inline GridFunction frac_integral_left(const GridFunction& f, double alpha) {
  detail::check_order(alpha, true);
  const AbelOperator op(f.grid(), alpha, f.left_exponent());
  return GridFunction(f.grid(), op.apply(f.values()), detail::integrated_exponents(f, alpha));
}

/// I^alpha_{T-} f = R I^alpha_{0+} R f, alpha in (0,1].
inline GridFunction frac_integral_right(const GridFunction& f, double alpha) {
  return frac_integral_left(f.reflect(), alpha).reflect();
}

}  // namespace gpdrift::frac
