#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "gpdrift/kernels/increment_covariance.hpp"
#include "gpdrift/kernels/spd_factor.hpp"
#include "gpdrift/simulate/sample_path.hpp"
#include "gpdrift/weights/weight_function.hpp"

namespace gpdrift::est {

using kernels::NoiseModel;
using kernels::TimeGrid;
using sim::DriftSpec;
using sim::SamplePath;

enum class Scheme { discrete, continuous };

inline std::string to_string(Scheme s) { return s == Scheme::discrete ? "discrete" : "continuous"; }

struct SolverMeta {
  weights::WeightMethod method;
  double residual;
};

struct EstimateResult {
  double theta_hat = 0.0;
  double variance = 0.0;
  Scheme scheme = Scheme::discrete;
  std::size_t n_obs = 0;
  NoiseModel model;
  DriftSpec drift;
  std::optional<SolverMeta> solver_meta;
  /// Fisher information 1/variance as computed (dG^T Gamma^{-1} dG or int g h).
  double information = 0.0;
};

/// Discrete-observation MLE on a fixed grid. Factors Gamma^(N) once and keeps
/// w = Gamma^{-1} dG, so each path costs one dot product.
class DiscreteEstimator {
 public:
  DiscreteEstimator(NoiseModel model, DriftSpec drift, const TimeGrid& grid)
      : model_(std::move(model)), drift_(std::move(drift)), grid_(grid),
        factor_(kernels::increment_covariance(model_, grid_).matrix),
        dg_(sim::drift_increments(drift_, grid_)) {
    if (dg_.cwiseAbs().maxCoeff() == 0.0) {
      throw PreconditionError("drift increments vanish on the grid: G(t_k) = 0 for every k");
    }
    w_ = factor_.solve(dg_);
    information_ = dg_.dot(w_);
    if (!(information_ > 0.0)) {
      throw DegeneracyError("dG^T Gamma^{-1} dG is not positive", information_);
    }
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  double information() const noexcept { return information_; }
  double variance() const noexcept { return 1.0 / information_; }
  const Eigen::VectorXd& solved_drift() const noexcept { return w_; }

  /// dG^T Gamma^{-1} dX.
  double score(const SamplePath& path) const {
    check(path);
    return w_.dot(path.increments());
  }

  EstimateResult estimate(const SamplePath& path) const {
    EstimateResult r;
    r.theta_hat = score(path) / information_;
    r.variance = 1.0 / information_;
    r.information = information_;
    r.scheme = Scheme::discrete;
    r.n_obs = grid_.size();
    r.model = model_;
    r.drift = drift_;
    return r;
  }

  /// log L(theta) = theta dG^T Gamma^{-1} dX - theta^2/2 dG^T Gamma^{-1} dG.
  double log_likelihood(double theta, const SamplePath& path) const {
    return theta * score(path) - 0.5 * theta * theta * information_;
  }

 private:
  void check(const SamplePath& path) const {
    if (!(path.grid == grid_)) throw AlignmentError("path grid differs from the estimator grid");
  }

  NoiseModel model_;
  DriftSpec drift_;
  TimeGrid grid_;
  kernels::SpdFactor factor_;
  Eigen::VectorXd dg_;
  Eigen::VectorXd w_;
  double information_ = 0.0;
};

inline EstimateResult estimate_discrete(const SamplePath& path) {
  return DiscreteEstimator(path.model, path.drift, path.grid).estimate(path);
}

inline double log_likelihood_discrete(double theta, const SamplePath& path) {
  return DiscreteEstimator(path.model, path.drift, path.grid).log_likelihood(theta, path);
}

/// Continuous-observation MLE: int h dX / int g h with the stochastic integral
/// replaced by sum_i h(s_i) (X_{t_i} - X_{t_{i-1}}) over the path grid, h taken
/// from the weight cell containing path cell i.
///
/// The sum is evaluated in summation-by-parts form
///   h_M X_T - sum_{i<M} (h_{i+1} - h_i) X_{t_i},
/// which is exact for piecewise-constant h.
inline EstimateResult estimate_continuous(const SamplePath& path, const weights::WeightFunction& weight) {
  const auto& wg = weight.grid();
  const std::size_t m = path.grid.size();
  if (!path.grid.is_uniform()) throw AlignmentError("continuous estimator needs a uniform path grid");
  if (std::abs(path.grid.horizon() - wg.T) > 1e-12 * wg.T) {
    throw AlignmentError("path horizon differs from the weight horizon");
  }
  if (m < wg.n || m % wg.n != 0) {
    throw AlignmentError("path grid must refine the weight grid (path cells a multiple of weight cells)");
  }
  if (!(weight.denom > 0.0)) throw PreconditionError("weight denominator must be positive");
  const std::size_t ratio = m / wg.n;
  const Eigen::VectorXd& h = weight.h.values();
  auto h_at = [&](std::size_t i) { return h(static_cast<Eigen::Index>(i / ratio)); };

  double sum = h_at(m - 1) * path.values[m - 1];
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double dh = h_at(i + 1) - h_at(i);
    if (dh != 0.0) sum -= dh * path.values[i];
  }

  EstimateResult r;
  r.theta_hat = sum / weight.denom;
  r.variance = 1.0 / weight.denom;
  r.information = weight.denom;
  r.scheme = Scheme::continuous;
  r.n_obs = m;
  r.model = path.model;
  r.drift = path.drift;
  r.solver_meta = SolverMeta{weight.method, weight.residual};
  return r;
}

/// Var(B_t) / G(t)^2; tends to 0 exactly when the discrete MLE is consistent.
inline double consistency_diagnostic(const NoiseModel& model, const DriftSpec& drift, double t) {
  if (!(t > 0.0)) throw ParameterError("consistency diagnostic needs t > 0");
  const double g = sim::drift_G(drift, t);
  if (g == 0.0) throw PreconditionError("Var B_t / G(t)^2 is undefined where G(t) = 0");
  return kernels::variance(model, t) / (g * g);
}

}  // namespace gpdrift::est
