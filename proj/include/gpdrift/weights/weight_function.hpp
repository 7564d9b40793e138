#pragma once

#include <utility>
#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "gpdrift/frac/gamma.hpp"
#include "gpdrift/frac/grid_function.hpp"
#include "gpdrift/kernels/noise_model.hpp"
#include "gpdrift/simulate/drift.hpp"

namespace gpdrift::weights {

using frac::GridFunction;
using frac::UniformGrid;
using kernels::NoiseModel;
using sim::DriftSpec;

enum class WeightMethod { closed_form, power_drift, fredholm_direct, neumann, second_kind_two_fbm };

inline std::string to_string(WeightMethod m) {
  switch (m) {
    case WeightMethod::closed_form: return "closed-form";
    case WeightMethod::power_drift: return "power-drift";
    case WeightMethod::fredholm_direct: return "fredholm-direct";
    case WeightMethod::neumann: return "neumann";
    case WeightMethod::second_kind_two_fbm: return "second-kind-two-fbm";
  }
  return "unknown";
}

/// Discretized solution h_T of Gamma_T h = g with its Fisher information.
struct WeightFunction {
  WeightFunction(GridFunction values, NoiseModel noise, DriftSpec g)
      : h(std::move(values)), model(std::move(noise)), drift(std::move(g)) {}

  GridFunction h;
  NoiseModel model;
  DriftSpec drift;
  /// int_0^T g h ds, exact where a closed form exists, else singularity-aware quadrature.
  double denom = 0.0;
  /// h * sum g_i h_i, the plain midpoint rule.
  double denom_midpoint = 0.0;
  WeightMethod method = WeightMethod::closed_form;
  /// max over interior nodes of |(Gamma h)(t) - g(t)|.
  double residual = 0.0;
  /// The same divided pointwise by |g(t)|.
  double relative_residual = 0.0;
  /// Relative L2 distance between the solutions on n and 2n cells (first-kind solves).
  std::optional<double> refinement_stability;
  /// Reciprocal condition estimate of the dense system, when one is solved.
  std::optional<double> rcond;
  /// Neumann partial sums used.
  std::optional<std::size_t> iterations;
  /// Factor c minimizing ||c Gamma h - g|| on interior nodes (power drift only).
  std::optional<double> lsq_factor;

  const UniformGrid& grid() const noexcept { return h.grid(); }
  double variance() const { return 1.0 / denom; }
};

/// g at the cell midpoints.
inline Eigen::VectorXd drift_on_grid(const DriftSpec& drift, const UniformGrid& grid) {
  Eigen::VectorXd g(grid.size());
  for (std::size_t i = 0; i < grid.n; ++i) g(static_cast<Eigen::Index>(i)) = sim::drift_g(drift, grid.node(i));
  return g;
}

namespace detail {

/// int over cell k (counted from the singular end) of (s/x_k)^E, in units of h:
/// [(k+1)^{E+1} - k^{E+1}] / ((E+1)(k+1/2)^E).
inline double cell_factor(std::size_t k, double e) {
  if (e == 0.0) return 1.0;
  const double kd = static_cast<double>(k);
  return (std::pow(kd + 1.0, e + 1.0) - std::pow(kd, e + 1.0)) / ((e + 1.0) * std::pow(kd + 0.5, e));
}

}  // namespace detail

/// int_0^T f ds for f sampled at midpoints with f ~ s^left at 0 and (T-s)^right
/// at T; each cell integrates the local power factor exactly.
inline double singular_quadrature(const Eigen::VectorXd& f, const UniformGrid& grid, double left, double right) {
  const std::size_t n = grid.n;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += f(static_cast<Eigen::Index>(i)) * detail::cell_factor(i, left) * detail::cell_factor(n - 1 - i, right);
  }
  return grid.h() * sum;
}

/// Fills residual, relative_residual and the midpoint denominator, and
/// computes the singularity-aware denominator unless one is already set.
inline void finalize(WeightFunction& w, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& g) {
  const Eigen::VectorXd r = gamma * w.h.values() - g;
  const auto [lo, hi] = frac::interior_range(w.grid().n);
  w.residual = r.segment(lo, hi - lo).cwiseAbs().maxCoeff();
  w.relative_residual = (r.segment(lo, hi - lo).array() / g.segment(lo, hi - lo).array().abs()).abs().maxCoeff();
  const Eigen::VectorXd gh = g.cwiseProduct(w.h.values());
  w.denom_midpoint = w.grid().h() * gh.sum();
  if (w.denom == 0.0) {
    const double eg = std::min(0.0, sim::drift_g_exponent(w.drift));
    w.denom = singular_quadrature(gh, w.grid(), eg + w.h.left_exponent(), w.h.right_exponent());
  }
}

}  // namespace gpdrift::weights
