#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <sstream>

#include "gpdrift/error.hpp"

namespace gpdrift::kernels {

/// Cholesky factorization of a covariance matrix with a single jitter retry.
///
/// If the plain factorization fails, 1e-12 * trace / N is added to the
/// diagonal and the factorization is retried once. A second failure raises
/// DegeneracyError carrying the smallest LDL^T pivot of the original matrix.
class SpdFactor {
 public:
  static constexpr double kJitterScale = 1e-12;

  SpdFactor() = default;

  explicit SpdFactor(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
      throw ParameterError("covariance factorization needs a nonempty square matrix");
    }
    llt_.compute(a);
    if (llt_.info() == Eigen::Success) return;

    const auto n = static_cast<double>(a.rows());
    jitter_ = kJitterScale * a.trace() / n;
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() += jitter_;
    llt_.compute(shifted);
    if (llt_.info() == Eigen::Success) return;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    const double pivot = ldlt.vectorD().minCoeff();
    std::ostringstream msg;
    msg << "covariance matrix is numerically degenerate (N=" << a.rows()
        << ", smallest pivot " << pivot << ") after jitter " << jitter_;
    throw DegeneracyError(msg.str(), pivot);
  }

  Eigen::Index size() const { return llt_.rows(); }
  double jitter() const noexcept { return jitter_; }
  bool jittered() const noexcept { return jitter_ != 0.0; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

  /// L * z with L the lower factor.
  Eigen::VectorXd lower_times(const Eigen::VectorXd& z) const {
    return llt_.matrixL() * z;
  }

  Eigen::MatrixXd lower() const { return llt_.matrixL(); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
};

}  // namespace gpdrift::kernels
