#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "gpdrift/kernels/increment_covariance.hpp"
#include "gpdrift/kernels/spd_factor.hpp"
#include "gpdrift/simulate/drift.hpp"
#include "gpdrift/simulate/rng.hpp"

namespace gpdrift::sim {

using kernels::NoiseModel;
using kernels::TimeGrid;

/// Observed values X_{t_i} = theta G(t_i) + B_{t_i} on a grid.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
  std::optional<double> theta_true;
  std::uint64_t seed = 0;
  NoiseModel model;
  DriftSpec drift;

  /// (X_{t_1}, X_{t_2}-X_{t_1}, ...).
  Eigen::VectorXd increments() const {
    Eigen::VectorXd dx(static_cast<Eigen::Index>(values.size()));
    double prev = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      dx(static_cast<Eigen::Index>(i)) = values[i] - prev;
      prev = values[i];
    }
    return dx;
  }

  /// Path built from explicit observations (real data or injected noise).
  static SamplePath from_values(TimeGrid grid, std::vector<double> values, NoiseModel model,
                                DriftSpec drift, std::optional<double> theta = std::nullopt) {
    if (values.size() != grid.size()) throw ParameterError("path values must match grid size");
    return SamplePath{std::move(grid), std::move(values), theta, 0, std::move(model), std::move(drift)};
  }

  /// Restriction to every `stride`-th node (stride divides the grid size).
  SamplePath restrict_every(std::size_t stride) const {
    if (stride == 0 || values.size() % stride != 0) {
      throw AlignmentError("restriction stride must divide the number of nodes");
    }
    std::vector<double> nodes;
    std::vector<double> v;
    for (std::size_t i = stride - 1; i < values.size(); i += stride) {
      nodes.push_back(grid[i]);
      v.push_back(values[i]);
    }
    return SamplePath{TimeGrid(std::move(nodes)), std::move(v), theta_true, seed, model, drift};
  }
};

/// Exact Gaussian simulation on a fixed grid; the increment covariance is
/// factored once and reused for every seed.
class PathSampler {
 public:
  PathSampler(NoiseModel model, DriftSpec drift, TimeGrid grid)
      : cov_(kernels::increment_covariance(model, grid)),
        factor_(cov_.matrix),
        drift_(std::move(drift)),
        dg_(drift_increments(drift_, cov_.grid)) {}

  /// Delta B = L z with z drawn from the seeded stream.
  Eigen::VectorXd noise_increments(std::uint64_t seed) const {
    NormalStream stream(seed);
    return factor_.lower_times(stream.vector(factor_.size()));
  }

  SamplePath sample(double theta, std::uint64_t seed) const {
    return assemble(theta, noise_increments(seed), seed);
  }

  /// X_{t_i} = theta G(t_i) + noise_scale * sum_{k<=i} dB_k.
  SamplePath assemble(double theta, const Eigen::VectorXd& noise, std::uint64_t seed,
                      double noise_scale = 1.0) const {
    const auto n = cov_.grid.size();
    std::vector<double> values(n);
    double level_b = 0.0;
    double level_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      level_b += noise(static_cast<Eigen::Index>(i));
      level_g += dg_(static_cast<Eigen::Index>(i));
      values[i] = theta * level_g + noise_scale * level_b;
    }
    return SamplePath{cov_.grid, std::move(values), theta, seed, cov_.model, drift_};
  }

  const kernels::IncrementCovariance& covariance() const noexcept { return cov_; }
  const kernels::SpdFactor& factor() const noexcept { return factor_; }
  const Eigen::VectorXd& drift_increments_vector() const noexcept { return dg_; }

 private:
  kernels::IncrementCovariance cov_;
  kernels::SpdFactor factor_;
  DriftSpec drift_;
  Eigen::VectorXd dg_;
};

inline SamplePath sample_path(const NoiseModel& model, const DriftSpec& drift, double theta,
                              const TimeGrid& grid, std::uint64_t seed) {
  return PathSampler(model, drift, grid).sample(theta, seed);
}

}  // namespace gpdrift::sim
