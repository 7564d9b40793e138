#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gpdrift/simulate/sample_path.hpp"

namespace gpdrift::sim {

/// Conditional Gaussian refinement of a uniform-grid path.
///
/// The fine grid T*k/(N*factor) contains the coarse nodes. Levels at the new
/// nodes are drawn from their law given the coarse levels; coarse values are
/// copied unchanged, so the refined path is the same realization seen finer.
class PathRefiner {
 public:
  PathRefiner(NoiseModel model, DriftSpec drift, const TimeGrid& coarse, std::size_t factor)
      : model_(std::move(model)), drift_(std::move(drift)), coarse_(coarse), factor_(factor),
        fine_(TimeGrid::uniform(coarse.horizon(), coarse.size() * std::max<std::size_t>(factor, 1))) {
    if (factor < 2) throw ParameterError("refinement factor must be >= 2");
    if (!coarse.is_uniform()) throw UnsupportedParameterError("refinement requires a uniform grid");

    std::vector<double> known_t;
    std::vector<double> unknown_t;
    for (std::size_t k = 0; k < fine_.size(); ++k) {
      if ((k + 1) % factor_ == 0) {
        known_t.push_back(fine_[k]);
      } else {
        unknown_index_.push_back(k);
        unknown_t.push_back(fine_[k]);
      }
    }
    const auto nk = static_cast<Eigen::Index>(known_t.size());
    const auto nu = static_cast<Eigen::Index>(unknown_t.size());

    const Eigen::MatrixXd kk = kernels::level_covariance(model_, known_t);
    const Eigen::MatrixXd uu = kernels::level_covariance(model_, unknown_t);
    Eigen::MatrixXd uk(nu, nk);
    for (Eigen::Index i = 0; i < nu; ++i) {
      for (Eigen::Index j = 0; j < nk; ++j) {
        uk(i, j) = kernels::cov(model_, unknown_t[static_cast<std::size_t>(i)],
                                known_t[static_cast<std::size_t>(j)]);
      }
    }
    const kernels::SpdFactor kk_factor(kk);
    // regression_ = Sigma_UK Sigma_KK^{-1}; Sigma_KK is symmetric so solve the transpose.
    regression_ = kk_factor.solve(Eigen::MatrixXd(uk.transpose())).transpose();
    Eigen::MatrixXd cond = uu - regression_ * uk.transpose();
    cond = 0.5 * (cond + cond.transpose()).eval();
    cond_factor_ = kernels::SpdFactor(cond);

    for (double t : known_t) known_drift_.push_back(drift_G(drift_, t));
    for (double t : unknown_t) unknown_drift_.push_back(drift_G(drift_, t));
  }

  const TimeGrid& fine_grid() const noexcept { return fine_; }
  std::size_t factor() const noexcept { return factor_; }

  SamplePath refine(const SamplePath& path, std::uint64_t seed) const {
    if (!(path.grid == coarse_)) throw AlignmentError("path grid differs from the refiner's coarse grid");
    if (!path.theta_true) {
      throw PreconditionError("refinement needs the drift parameter to separate drift from noise");
    }
    const double theta = *path.theta_true;
    const auto nk = static_cast<Eigen::Index>(coarse_.size());
    Eigen::VectorXd b_known(nk);
    for (Eigen::Index j = 0; j < nk; ++j) {
      b_known(j) = path.values[static_cast<std::size_t>(j)] - theta * known_drift_[static_cast<std::size_t>(j)];
    }
    NormalStream stream(seed);
    const Eigen::VectorXd b_unknown =
        regression_ * b_known + cond_factor_.lower_times(stream.vector(cond_factor_.size()));

    std::vector<double> values(fine_.size());
    for (std::size_t j = 0; j < coarse_.size(); ++j) values[(j + 1) * factor_ - 1] = path.values[j];
    for (std::size_t i = 0; i < unknown_index_.size(); ++i) {
      values[unknown_index_[i]] =
          theta * unknown_drift_[i] + b_unknown(static_cast<Eigen::Index>(i));
    }
    return SamplePath{fine_, std::move(values), path.theta_true, seed, model_, drift_};
  }

 private:
  NoiseModel model_;
  DriftSpec drift_;
  TimeGrid coarse_;
  std::size_t factor_;
  TimeGrid fine_;
  std::vector<std::size_t> unknown_index_;
  std::vector<double> known_drift_;
  std::vector<double> unknown_drift_;
  Eigen::MatrixXd regression_;
  kernels::SpdFactor cond_factor_;
};

/// Seed used for the new nodes when the caller does not pick one.
inline std::uint64_t default_refinement_seed(const SamplePath& path, std::size_t factor) {
  return derive_stream_seed(path.seed, 0x5eed0000ULL + factor);
}

inline SamplePath refine_path(const SamplePath& path, std::size_t factor, std::uint64_t seed) {
  return PathRefiner(path.model, path.drift, path.grid, factor).refine(path, seed);
}

inline SamplePath refine_path(const SamplePath& path, std::size_t factor) {
  return refine_path(path, factor, default_refinement_seed(path, factor));
}

}  // namespace gpdrift::sim
