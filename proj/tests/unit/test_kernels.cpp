#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gpdrift/kernels.hpp"

using namespace gpdrift;
using namespace gpdrift::kernels;

namespace {

// Two-sided fBm covariance, valid for negative times too.
double fbm_cov_ext(double h, double s, double t) {
  return 0.5 * (std::pow(std::abs(s), 2 * h) + std::pow(std::abs(t), 2 * h) - std::pow(std::abs(t - s), 2 * h));
}

// Entry-by-entry assembly from cov() at the four corners of each cell pair.
Eigen::MatrixXd brute_force_increments(const NoiseModel& m, const std::vector<double>& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  auto at = [&](Eigen::Index i) { return i == 0 ? 0.0 : t[static_cast<std::size_t>(i - 1)]; };
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 1; j <= n; ++j) {
      g(i - 1, j - 1) = cov(m, at(i), at(j)) - cov(m, at(i), at(j - 1)) - cov(m, at(i - 1), at(j)) +
                        cov(m, at(i - 1), at(j - 1));
    }
  }
  return g;
}

std::vector<NoiseModel> all_models() {
  return {Wiener{}, Fbm{0.3}, Fbm{0.75}, SubFbm{0.6}, MixedBmFbm{0.7}, TwoFbm{0.6, 0.8}};
}

std::vector<double> random_grid(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> t(n);
  double acc = 0.0;
  for (auto& x : t) x = (acc += u(rng));
  return t;
}

}  // namespace

// -----------------------------------------------------------------------------
// cov
// -----------------------------------------------------------------------------

TEST(Covariance, FbmAtOneOne) {
  for (double h : {0.1, 0.5, 0.75, 0.95}) EXPECT_DOUBLE_EQ(cov(Fbm{h}, 1.0, 1.0), 1.0);
}

TEST(Covariance, SubFbmHalfIsWiener) {
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.3, 1.7}, {2.0, 0.5}, {1.0, 1.0}}) {
    EXPECT_NEAR(cov(SubFbm{0.5}, s, t), std::min(s, t), 1e-14);
  }
}

TEST(Covariance, FbmHandValue) {
  EXPECT_NEAR(cov(Fbm{0.75}, 1.0, 2.0), 1.414214, 1e-6);
}

TEST(Covariance, SubFbmVariance) {
  for (double h : {0.3, 0.6, 0.7}) {
    for (double t : {0.5, 2.0}) {
      EXPECT_NEAR(cov(SubFbm{h}, t, t), (2.0 - std::pow(2.0, 2 * h - 1)) * std::pow(t, 2 * h), 1e-12);
    }
  }
}

TEST(Covariance, MixedAndTwoFbmAreSums) {
  EXPECT_NEAR(cov(MixedBmFbm{0.7}, 0.4, 1.3), 0.4 + fbm_cov_ext(0.7, 0.4, 1.3), 1e-14);
  EXPECT_NEAR(cov(TwoFbm{0.6, 0.8}, 0.4, 1.3), fbm_cov_ext(0.6, 0.4, 1.3) + fbm_cov_ext(0.8, 0.4, 1.3), 1e-14);
}

TEST(Covariance, SubFbmReflectionRepresentation) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (double h : {0.3, 0.6, 0.8}) {
    for (int k = 0; k < 20; ++k) {
      const double s = u(rng), t = u(rng);
      const double ref =
          0.5 * (fbm_cov_ext(h, s, t) + fbm_cov_ext(h, s, -t) + fbm_cov_ext(h, -s, t) + fbm_cov_ext(h, -s, -t));
      EXPECT_NEAR(cov(SubFbm{h}, s, t), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(Covariance, RejectsInvalidHurst) {
  EXPECT_THROW(cov(Fbm{1.0}, 1, 1), ParameterError);
  EXPECT_THROW(cov(Fbm{0.0}, 1, 1), ParameterError);
  EXPECT_THROW(cov(SubFbm{-0.2}, 1, 1), ParameterError);
  EXPECT_THROW(cov(TwoFbm{0.8, 0.6}, 1, 1), ParameterError);
  EXPECT_THROW(cov(TwoFbm{0.7, 0.7}, 1, 1), ParameterError);
}

TEST(Covariance, Describe) {
  EXPECT_EQ(describe(Wiener{}), "wiener");
  EXPECT_EQ(describe(Fbm{0.75}), "fbm(H=0.75)");
  EXPECT_EQ(describe(TwoFbm{0.6, 0.8}), "two_fbm(H1=0.6;H2=0.8)");
}

// -----------------------------------------------------------------------------
// increment_covariance
// -----------------------------------------------------------------------------

TEST(IncrementCovariance, WienerUnitSteps) {
  const auto g = increment_covariance(Wiener{}, TimeGrid({1.0, 2.0, 3.0}));
  EXPECT_TRUE(g.matrix.isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-15));
}

TEST(IncrementCovariance, FbmTwoPoints) {
  const auto g = increment_covariance(Fbm{0.75}, TimeGrid({1.0, 2.0}));
  const double off = std::pow(2.0, 1.5) / 2.0 - 1.0;
  EXPECT_NEAR(g.matrix(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(g.matrix(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(g.matrix(0, 1), off, 1e-14);
  EXPECT_NEAR(g.matrix(1, 0), 0.414214, 1e-6);
}

TEST(IncrementCovariance, TwoFbmIsSumOfParts) {
  const auto grid = TimeGrid::uniform(3.0, 17);
  const auto a = increment_covariance(TwoFbm{0.6, 0.8}, grid).matrix;
  const Eigen::MatrixXd b = increment_covariance(Fbm{0.6}, grid).matrix + increment_covariance(Fbm{0.8}, grid).matrix;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(IncrementCovariance, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  for (const auto& m : all_models()) {
    for (std::size_t n : {1, 5, 33, 64}) {
      const auto t = random_grid(rng, n);
      const auto g = increment_covariance(m, TimeGrid(t)).matrix;
      EXPECT_LT((g - brute_force_increments(m, t)).cwiseAbs().maxCoeff(), 1e-10) << describe(m) << " n=" << n;
      EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(IncrementCovariance, PositiveSemidefinite) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  for (const auto& m : all_models()) {
    const auto g = increment_covariance(m, TimeGrid::uniform(4.0, 64)).matrix;
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd v(64);
      for (auto& x : v) x = z(rng);
      EXPECT_GE(v.dot(g * v), -1e-10 * v.squaredNorm());
    }
  }
}

// -----------------------------------------------------------------------------
// kernel_density
// -----------------------------------------------------------------------------

TEST(KernelDensity, FbmHandValue) { EXPECT_DOUBLE_EQ(kernel_density(Fbm{0.75}, 1.0, 2.0), 0.375); }

TEST(KernelDensity, SubFbmBelowFbm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double s = u(rng), t = u(rng);
    EXPECT_LT(kernel_density(SubFbm{0.6}, s, t), kernel_density(Fbm{0.6}, s, t));
  }
}

TEST(KernelDensity, TwoFbmAdditive) {
  EXPECT_NEAR(kernel_density(TwoFbm{0.6, 0.8}, 0.3, 0.9),
              kernel_density(Fbm{0.6}, 0.3, 0.9) + kernel_density(Fbm{0.8}, 0.3, 0.9), 1e-15);
}

TEST(KernelDensity, MixedExcludesIdentity) {
  EXPECT_DOUBLE_EQ(kernel_density(MixedBmFbm{0.7}, 0.3, 0.9), kernel_density(Fbm{0.7}, 0.3, 0.9));
}

TEST(KernelDensity, Errors) {
  EXPECT_THROW(kernel_density(Fbm{0.7}, 1.0, 1.0), SingularityError);
  EXPECT_THROW(kernel_density(Fbm{0.4}, 1.0, 2.0), UnsupportedParameterError);
  EXPECT_THROW(kernel_density(Fbm{0.5}, 1.0, 2.0), UnsupportedParameterError);
  EXPECT_THROW(kernel_density(MixedBmFbm{0.3}, 1.0, 2.0), UnsupportedParameterError);
  EXPECT_THROW(kernel_density(Wiener{}, 1.0, 2.0), UnsupportedParameterError);
}

// -----------------------------------------------------------------------------
// TimeGrid, SpdFactor
// -----------------------------------------------------------------------------

TEST(TimeGrid, Validation) {
  EXPECT_THROW(TimeGrid(std::vector<double>{}), ParameterError);
  EXPECT_THROW(TimeGrid({0.0, 1.0}), ParameterError);
  EXPECT_THROW(TimeGrid({1.0, 1.0}), ParameterError);
  EXPECT_THROW(TimeGrid({1.0, std::nan("")}), ParameterError);
  const auto g = TimeGrid::uniform(2.0, 4);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g.horizon(), 2.0);
  EXPECT_TRUE(g.is_uniform());
  EXPECT_FALSE(TimeGrid({1.0, 3.0, 4.0}).is_uniform());
}

TEST(SpdFactor, SolvesWithoutJitter) {
  Eigen::MatrixXd a(2, 2);
  a << 4, 1, 1, 3;
  const SpdFactor f(a);
  EXPECT_FALSE(f.jittered());
  const Eigen::Vector2d b(1, 2);
  EXPECT_TRUE((a * f.solve(Eigen::VectorXd(b))).isApprox(Eigen::VectorXd(b), 1e-14));
}

TEST(SpdFactor, DegeneracyNamesPivot) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(3, 3);
  a(2, 2) = -5.0;
  try {
    SpdFactor f(a);
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_NE(std::string(e.what()).find("pivot"), std::string::npos);
  }
}
