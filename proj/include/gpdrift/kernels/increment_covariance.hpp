#pragma once

#include <Eigen/Dense>
#include <span>

#include "gpdrift/kernels/noise_model.hpp"
#include "gpdrift/kernels/time_grid.hpp"

namespace gpdrift::kernels {

/// Covariance matrix of (B_{t_1}, B_{t_2}-B_{t_1}, ..., B_{t_N}-B_{t_{N-1}}).
struct IncrementCovariance {
  Eigen::MatrixXd matrix;
  TimeGrid grid;
  NoiseModel model;
};

/// Covariance of the levels (B_{t_1}, ..., B_{t_N}).
inline Eigen::MatrixXd level_covariance(const NoiseModel& model, std::span<const double> times) {
  validate(model);
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      c(i, j) = cov(model, times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]);
      c(j, i) = c(i, j);
    }
  }
  return c;
}

inline IncrementCovariance increment_covariance(const NoiseModel& model, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  // Levels with the implicit t_0 = 0 prepended; B_0 = 0 so row/column 0 vanish.
  Eigen::MatrixXd lv = Eigen::MatrixXd::Zero(n + 1, n + 1);
  lv.bottomRightCorner(n, n) = level_covariance(model, grid.nodes());

  IncrementCovariance out{Eigen::MatrixXd(n, n), grid, model};
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 1; j <= i; ++j) {
      const double v = lv(i, j) - lv(i, j - 1) - lv(i - 1, j) + lv(i - 1, j - 1);
      out.matrix(i - 1, j - 1) = v;
      out.matrix(j - 1, i - 1) = v;
    }
  }
  return out;
}

}  // namespace gpdrift::kernels
