#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

#include "gpdrift/error.hpp"

namespace gpdrift::frac {

/// [0,T] split into n equal cells; functions live at the cell midpoints.
struct UniformGrid {
  double T = 1.0;
  std::size_t n = 0;

  UniformGrid() = default;
  UniformGrid(double horizon, std::size_t cells) : T(horizon), n(cells) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("quadrature grid needs T > 0");
    if (n == 0) throw ParameterError("quadrature grid needs n >= 1 cells");
  }

  double h() const noexcept { return T / static_cast<double>(n); }
  double node(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h(); }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(n); }

  Eigen::VectorXd nodes() const {
    Eigen::VectorXd x(size());
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = node(i);
    return x;
  }

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

/// Leading power exponents of a function at 0 and at T: f ~ s^left near 0,
/// f ~ (T-s)^right near T.
struct EndpointExponents {
  double left = 0.0;
  double right = 0.0;
  bool heuristic = false;

  friend bool operator==(const EndpointExponents&, const EndpointExponents&) = default;
};

/// Interior nodes used for accuracy checks: m = max(2, n/64) cells are
/// dropped at each end. Returns [first, last).
inline std::pair<Eigen::Index, Eigen::Index> interior_range(std::size_t n) {
  const std::size_t m = std::max<std::size_t>(2, n / 64);
  if (2 * m >= n) return {0, static_cast<Eigen::Index>(n)};
  return {static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n - m)};
}

class GridFunction {
 public:
  GridFunction(UniformGrid grid, Eigen::VectorXd values,
               std::optional<EndpointExponents> singularity = std::nullopt)
      : grid_(grid), values_(std::move(values)), singularity_(singularity) {
    if (values_.size() != grid_.size()) throw ParameterError("grid function length must equal the cell count");
    if (singularity_) {
      for (double e : {singularity_->left, singularity_->right}) {
        if (!(e > -1.0 && e <= 0.0)) {
          throw ParameterError("endpoint exponents must lie in (-1, 0]");
        }
      }
    }
  }

  template <class F>
  static GridFunction sample(UniformGrid grid, F&& f,
                             std::optional<EndpointExponents> singularity = std::nullopt) {
    Eigen::VectorXd v(grid.size());
    for (std::size_t i = 0; i < grid.n; ++i) v(static_cast<Eigen::Index>(i)) = f(grid.node(i));
    return GridFunction(grid, std::move(v), singularity);
  }

  static GridFunction constant(UniformGrid grid, double c) {
    return GridFunction(grid, Eigen::VectorXd::Constant(grid.size(), c));
  }

  const UniformGrid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }
  const std::optional<EndpointExponents>& singularity() const noexcept { return singularity_; }

  double left_exponent() const noexcept { return singularity_ ? singularity_->left : 0.0; }
  double right_exponent() const noexcept { return singularity_ ? singularity_->right : 0.0; }

  /// f(T - t); exponents swap ends.
  GridFunction reflect() const {
    std::optional<EndpointExponents> s;
    if (singularity_) s = EndpointExponents{singularity_->right, singularity_->left, singularity_->heuristic};
    return GridFunction(grid_, values_.reverse(), s);
  }

  std::pair<Eigen::Index, Eigen::Index> interior() const { return interior_range(grid_.n); }

 private:
  UniformGrid grid_;
  Eigen::VectorXd values_;
  std::optional<EndpointExponents> singularity_;
};

/// Max |a - b| over interior nodes.
inline double max_interior_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto [lo, hi] = interior_range(static_cast<std::size_t>(a.size()));
  return (a.segment(lo, hi - lo) - b.segment(lo, hi - lo)).cwiseAbs().maxCoeff();
}

}  // namespace gpdrift::frac
