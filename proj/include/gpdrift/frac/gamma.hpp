#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <variant>

#include "gpdrift/frac/grid_function.hpp"
#include "gpdrift/kernels/noise_model.hpp"

namespace gpdrift::frac {

namespace detail {

inline void require_long_memory(double h, const char* name) {
  if (!(h > 0.5 && h < 1.0)) {
    throw UnsupportedParameterError(std::string("covariance operator needs 1/2 < ") + name + " < 1, got " +
                                    std::to_string(h));
  }
}

}  // namespace detail

/// Product-integration matrix of f -> int_0^T H(2H-1)|t-s|^{2H-2} f(s) ds with
/// f constant on cells. Toeplitz, symmetric.
inline Eigen::MatrixXd fbm_gamma_matrix(const UniformGrid& grid, double hurst) {
  detail::require_long_memory(hurst, "H");
  const auto n = grid.size();
  const double p = 2.0 * hurst - 1.0;
  const double hp = std::pow(grid.h(), p);
  Eigen::VectorXd w(n);
  w(0) = 2.0 * hurst * std::pow(0.5 * grid.h(), p);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    w(k) = hurst * hp * (std::pow(kd + 0.5, p) - std::pow(kd - 0.5, p));
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = w(std::abs(i - j));
  }
  return m;
}

/// Sub-fBm operator: the fBm matrix minus the exact cell integrals of
/// H(2H-1)(t+s)^{2H-2}.
inline Eigen::MatrixXd subfbm_gamma_matrix(const UniformGrid& grid, double hurst) {
  Eigen::MatrixXd m = fbm_gamma_matrix(grid, hurst);
  const double p = 2.0 * hurst - 1.0;
  const double h = grid.h();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid.node(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
      const double c = static_cast<double>(j) * h;
      m(i, j) -= hurst * (std::pow(x + c + h, p) - std::pow(x + c, p));
    }
  }
  return m;
}

/// Discretized covariance operator Gamma_T of the model. Wiener gives the
/// identity; the mixed model adds the identity to its fBm part.
inline Eigen::MatrixXd gamma_matrix(const kernels::NoiseModel& model, const UniformGrid& grid) {
  kernels::validate(model);
  return std::visit(
      [&](const auto& m) -> Eigen::MatrixXd {
        using M = std::decay_t<decltype(m)>;
        const auto n = grid.size();
        if constexpr (std::is_same_v<M, kernels::Wiener>) {
          return Eigen::MatrixXd::Identity(n, n);
        } else if constexpr (std::is_same_v<M, kernels::Fbm>) {
          return fbm_gamma_matrix(grid, m.hurst);
        } else if constexpr (std::is_same_v<M, kernels::SubFbm>) {
          detail::require_long_memory(m.hurst, "H");
          return subfbm_gamma_matrix(grid, m.hurst);
        } else if constexpr (std::is_same_v<M, kernels::MixedBmFbm>) {
          detail::require_long_memory(m.hurst, "H");
          Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
          if (m.fbm_scale != 0.0) a += m.fbm_scale * fbm_gamma_matrix(grid, m.hurst);
          return a;
        } else {
          detail::require_long_memory(m.hurst1, "H1");
          detail::require_long_memory(m.hurst2, "H2");
          Eigen::MatrixXd a = fbm_gamma_matrix(grid, m.hurst1);
          if (m.second_scale != 0.0) a += m.second_scale * fbm_gamma_matrix(grid, m.hurst2);
          return a;
        }
      },
      model);
}

/// (Gamma_T f)(x_i) at the midpoints. Singularity metadata of f is not used:
/// f is treated as constant on cells.
inline GridFunction apply_gamma(const kernels::NoiseModel& model, const GridFunction& f) {
  return GridFunction(f.grid(), gamma_matrix(model, f.grid()) * f.values());
}

}  // namespace gpdrift::frac
