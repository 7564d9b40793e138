#include <gtest/gtest.h>

#include <cmath>

#include "gpdrift/estimators.hpp"
#include "gpdrift/simulate.hpp"
#include "gpdrift/weights.hpp"

using namespace gpdrift;
using namespace gpdrift::est;
using kernels::TimeGrid;

namespace {

sim::SamplePath noise_free(const kernels::NoiseModel& m, const sim::DriftSpec& d, double theta, const TimeGrid& g) {
  const sim::PathSampler s(m, d, g);
  return s.assemble(theta, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size())), 0, 0.0);
}

}  // namespace

// -----------------------------------------------------------------------------
// Discrete MLE
// -----------------------------------------------------------------------------

TEST(DiscreteMle, WienerTwoPointFormula) {
  const TimeGrid g({0.3, 0.7, 1.9, 2.0, 3.4});
  const auto p = sim::sample_path(kernels::Wiener{}, sim::LinearDrift{}, 0.8, g, 5);
  const auto r = estimate_discrete(p);
  EXPECT_NEAR(r.theta_hat, p.values.back() / 3.4, 1e-12);
  EXPECT_NEAR(r.variance, 1.0 / 3.4, 1e-12);
  EXPECT_EQ(r.scheme, Scheme::discrete);
  EXPECT_EQ(r.n_obs, 5u);
}

TEST(DiscreteMle, NoiseFreeIsExact) {
  for (const kernels::NoiseModel& m :
       {kernels::NoiseModel{kernels::Fbm{0.3}}, kernels::NoiseModel{kernels::SubFbm{0.6}},
        kernels::NoiseModel{kernels::TwoFbm{0.6, 0.8}}}) {
    const auto p = noise_free(m, sim::PowerDrift{0.4}, 1.7, TimeGrid::uniform(2.0, 32));
    EXPECT_NEAR(estimate_discrete(p).theta_hat, 1.7, 1e-12);
  }
}

TEST(DiscreteMle, VarianceMatchesInformation) {
  const auto g = TimeGrid::uniform(4.0, 48);
  const DiscreteEstimator e(kernels::Fbm{0.7}, sim::LinearDrift{}, g);
  // Recompute dG^T Gamma^{-1} dG with an independent LU solve.
  const auto gamma = kernels::increment_covariance(kernels::Fbm{0.7}, g).matrix;
  const Eigen::VectorXd dg = sim::drift_increments(sim::LinearDrift{}, g);
  const double info = dg.dot(gamma.fullPivLu().solve(dg));
  EXPECT_NEAR(e.variance(), 1.0 / info, 1e-12 * e.variance());
  const auto r = e.estimate(sim::sample_path(kernels::Fbm{0.7}, sim::LinearDrift{}, 1.0, g, 3));
  EXPECT_NEAR(r.variance, 1.0 / info, 1e-12 * r.variance);
}

TEST(DiscreteMle, LogLikelihood) {
  const auto g = TimeGrid::uniform(3.0, 40);
  const auto p = sim::sample_path(kernels::MixedBmFbm{0.7}, sim::LinearDrift{}, 0.6, g, 17);
  const double hat = estimate_discrete(p).theta_hat;
  EXPECT_EQ(log_likelihood_discrete(0.0, p), 0.0);

  double best = -1.0, best_ll = -INFINITY;
  for (int k = -30000; k <= 30000; ++k) {
    const double th = 1e-4 * k;
    const double ll = log_likelihood_discrete(th, p);
    if (ll > best_ll) best_ll = ll, best = th;
  }
  EXPECT_NEAR(best, hat, 1e-4);

  const DiscreteEstimator e(kernels::MixedBmFbm{0.7}, sim::LinearDrift{}, g);
  const double d = 1e-2;
  const double second = (e.log_likelihood(hat + d, p) - 2 * e.log_likelihood(hat, p) + e.log_likelihood(hat - d, p)) / (d * d);
  EXPECT_NEAR(second, -1.0 / e.variance(), 1e-8 / e.variance());
}

TEST(DiscreteMle, ScaleEquivariance) {
  const auto g = TimeGrid::uniform(2.0, 32);
  const sim::PathSampler s(kernels::TwoFbm{0.6, 0.8}, sim::LinearDrift{}, g);
  const DiscreteEstimator e(kernels::TwoFbm{0.6, 0.8}, sim::LinearDrift{}, g);
  const Eigen::VectorXd noise = s.noise_increments(44);
  const double theta = 1.25;
  const double base = e.estimate(s.assemble(theta, noise, 44)).theta_hat - theta;
  for (double c : {0.5, 2.0, 8.0}) {
    const double scaled = e.estimate(s.assemble(theta, noise, 44, c)).theta_hat - theta;
    EXPECT_NEAR(scaled, c * base, 1e-12 * std::max(1.0, std::abs(c * base)));
    // Gamma scales by c^2 under B -> cB, and so does the variance.
    const Eigen::MatrixXd gamma = c * c * s.covariance().matrix;
    const Eigen::VectorXd dg = s.drift_increments_vector();
    EXPECT_NEAR(1.0 / dg.dot(gamma.llt().solve(dg)), c * c * e.variance(), 1e-10 * c * c * e.variance());
  }
}

TEST(DiscreteMle, MonotoneInformation) {
  for (const kernels::NoiseModel& m :
       {kernels::NoiseModel{kernels::Wiener{}}, kernels::NoiseModel{kernels::Fbm{0.7}},
        kernels::NoiseModel{kernels::Fbm{0.3}}, kernels::NoiseModel{kernels::SubFbm{0.6}},
        kernels::NoiseModel{kernels::MixedBmFbm{0.7}}, kernels::NoiseModel{kernels::TwoFbm{0.6, 0.8}}}) {
    double prev = 0.0;
    for (std::size_t n : {16, 32, 64}) {
      const double info = DiscreteEstimator(m, sim::PowerDrift{0.3}, TimeGrid::uniform(2.0, n)).information();
      EXPECT_GE(info, prev * (1 - 1e-12)) << kernels::describe(m) << " n=" << n;
      prev = info;
    }
  }
}

TEST(DiscreteMle, Preconditions) {
  const sim::TabulatedDrift zero({0.0, 5.0}, {0.0, 0.0});
  EXPECT_THROW(DiscreteEstimator(kernels::Wiener{}, zero, TimeGrid::uniform(1.0, 4)), PreconditionError);
  const DiscreteEstimator e(kernels::Wiener{}, sim::LinearDrift{}, TimeGrid::uniform(1.0, 4));
  const auto p = sim::sample_path(kernels::Wiener{}, sim::LinearDrift{}, 1.0, TimeGrid::uniform(1.0, 8), 1);
  EXPECT_THROW(e.estimate(p), AlignmentError);
}

// -----------------------------------------------------------------------------
// Continuous MLE
// -----------------------------------------------------------------------------

TEST(ContinuousMle, WienerIsEndpointRatio) {
  const auto p = sim::sample_path(kernels::Wiener{}, sim::LinearDrift{}, 2.0, TimeGrid::uniform(3.0, 64), 8);
  const auto w = weights::weight_wiener(sim::LinearDrift{}, 3.0, 64);
  EXPECT_DOUBLE_EQ(estimate_continuous(p, w).theta_hat, p.values.back() / 3.0);
  EXPECT_DOUBLE_EQ(estimate_continuous(p, w).theta_hat, estimate_discrete(p).theta_hat);
}

TEST(ContinuousMle, NoiseFreeQuadratureBias) {
  const double theta = 1.3;
  double prev = INFINITY;
  for (std::size_t n : {256, 512, 1024}) {
    const auto w = weights::weight_fbm_linear(0.7, 1.0, n);
    const auto p = noise_free(kernels::Fbm{0.7}, sim::LinearDrift{}, theta, TimeGrid::uniform(1.0, n));
    const double bias = std::abs(estimate_continuous(p, w).theta_hat - theta);
    EXPECT_LE(bias, 1e-2 * theta);
    EXPECT_LE(bias, 0.75 * prev) << "n=" << n;
    prev = bias;
  }
}

TEST(ContinuousMle, FinerPathThanWeight) {
  const auto w = weights::weight_fbm_linear(0.7, 1.0, 128);
  const auto p = noise_free(kernels::Fbm{0.7}, sim::LinearDrift{}, 1.0, TimeGrid::uniform(1.0, 512));
  EXPECT_NEAR(estimate_continuous(p, w).theta_hat, 1.0, 3e-2);
}

TEST(ContinuousMle, SampleVarianceMatchesDenominator) {
  const std::size_t n = 256, reps = 10000;
  const auto w = weights::weight_fbm_linear(0.7, 1.0, n);
  const sim::PathSampler s(kernels::Fbm{0.7}, sim::LinearDrift{}, TimeGrid::uniform(1.0, n));
  std::vector<double> th(reps);
  for (std::size_t i = 0; i < reps; ++i) th[i] = estimate_continuous(s.sample(0.5, sim::derive_stream_seed(12, i)), w).theta_hat;
  EXPECT_NEAR(stats::sample_variance(th) * w.denom, 1.0, 0.1);
}

TEST(ContinuousMle, Alignment) {
  const auto w = weights::weight_fbm_linear(0.7, 1.0, 64);
  const auto p = sim::sample_path(kernels::Fbm{0.7}, sim::LinearDrift{}, 1.0, TimeGrid::uniform(1.0, 96), 1);
  EXPECT_THROW(estimate_continuous(p, w), AlignmentError);
  const auto q = sim::sample_path(kernels::Fbm{0.7}, sim::LinearDrift{}, 1.0, TimeGrid::uniform(2.0, 64), 1);
  EXPECT_THROW(estimate_continuous(q, w), AlignmentError);
  const auto r = sim::sample_path(kernels::Fbm{0.7}, sim::LinearDrift{}, 1.0, TimeGrid::uniform(1.0, 32), 1);
  EXPECT_THROW(estimate_continuous(r, w), AlignmentError);
}

// -----------------------------------------------------------------------------
// Consistency diagnostic and statistics helpers
// -----------------------------------------------------------------------------

TEST(ConsistencyDiagnostic, Examples) {
  EXPECT_NEAR(consistency_diagnostic(kernels::Fbm{0.7}, sim::LinearDrift{}, 100.0), std::pow(100.0, -0.6), 1e-15);
  EXPECT_NEAR(std::pow(100.0, -0.6), 0.0631, 1e-4);
  for (double t : {2.0, 50.0}) {
    EXPECT_NEAR(consistency_diagnostic(kernels::TwoFbm{0.6, 0.8}, sim::LinearDrift{}, t),
                std::pow(t, -0.8) + std::pow(t, -0.4), 1e-14);
  }
  const double a = consistency_diagnostic(kernels::Fbm{0.7}, sim::PowerDrift{-0.3}, 1.0);
  EXPECT_NEAR(consistency_diagnostic(kernels::Fbm{0.7}, sim::PowerDrift{-0.3}, 1000.0), a, 1e-12 * a);
  const sim::TabulatedDrift zero({0.0, 5.0}, {0.0, 0.0});
  EXPECT_THROW(consistency_diagnostic(kernels::Wiener{}, zero, 1.0), PreconditionError);
}

TEST(Stats, Basics) {
  const std::vector<double> x{1.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(stats::mean(x), 7.0 / 3.0);
  EXPECT_NEAR(stats::sample_variance(x), 7.0 / 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(stats::mean_square(x), 7.0);
  EXPECT_NEAR(stats::ks_critical(10000), 0.0163, 1e-4);
  EXPECT_NEAR(stats::normal_cdf(1.959963984540054), 0.975, 1e-12);
  const std::vector<double> t{1, 2, 4, 8}, y{3, 12, 48, 192};
  EXPECT_NEAR(stats::log_log_slope(t, y), 2.0, 1e-12);
}
