#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <sstream>

#include "gpdrift/frac/power_kernel.hpp"
#include "gpdrift/weights/weight_function.hpp"

namespace gpdrift::weights {

enum class MixedMethod { direct, neumann };
enum class ConstantPolicy { analytic, least_squares };

struct WeightOptions {
  /// Bound on relative_residual; a weight above it is not returned.
  double residual_tolerance = 5e-2;

  MixedMethod mixed_method = MixedMethod::direct;
  double neumann_tolerance = 1e-10;
  std::size_t neumann_max_iterations = 10000;

  bool check_stability = true;
  double stability_tolerance = 5e-2;
  /// Tikhonov parameter for first-kind solves; 0 solves the plain system.
  double regularization = 0.0;

  /// Re-integration check applied to every column of Gamma_{H1}^{-1} Gamma_{H2}.
  frac::DerivativeCheck column_check{true, 0.3, frac::ResidualNorm::l2};

  ConstantPolicy constant_policy = ConstantPolicy::analytic;
};

namespace detail {

inline void check_residual(const WeightFunction& w, const WeightOptions& opt) {
  if (!(w.relative_residual <= opt.residual_tolerance)) {
    std::ostringstream msg;
    msg << to_string(w.method) << " weight for " << kernels::describe(w.model) << " on n=" << w.grid().n
        << " has forward residual " << w.relative_residual << " above tolerance " << opt.residual_tolerance;
    throw SolverFailure(msg.str());
  }
}

inline void check_horizon(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("horizon T must be positive and finite");
}

}  // namespace detail

/// C_H = 1 / (H(2H-1) B(H-1/2, 3/2-H)).
inline double fbm_weight_constant(double hurst) {
  return 1.0 / (hurst * (2.0 * hurst - 1.0) * boost::math::beta(hurst - 0.5, 1.5 - hurst));
}

/// int_0^T C_H s^{1/2-H}(T-s)^{1/2-H} ds = C_H B(3/2-H, 3/2-H) T^{2-2H}.
inline double fbm_weight_denom(double hurst, double T) {
  return fbm_weight_constant(hurst) * boost::math::beta(1.5 - hurst, 1.5 - hurst) * std::pow(T, 2.0 - 2.0 * hurst);
}

/// h_T(s) = C_H s^{1/2-H}(T-s)^{1/2-H} at the midpoints.
inline GridFunction fbm_weight_values(double hurst, const UniformGrid& grid) {
  const double c = fbm_weight_constant(hurst);
  const double e = 0.5 - hurst;
  // T - s is taken as the mirrored node so that h(s) = h(T - s) holds bit for bit.
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.n; ++i) {
    v(static_cast<Eigen::Index>(i)) = c * (std::pow(grid.node(i), e) * std::pow(grid.node(grid.n - 1 - i), e));
  }
  return GridFunction(grid, std::move(v), frac::EndpointExponents{e, e, false});
}

/// Wiener noise: Gamma is the identity, so h = g.
inline WeightFunction weight_wiener(const DriftSpec& drift, double T, std::size_t n) {
  detail::check_horizon(T);
  sim::validate(drift);
  const UniformGrid grid(T, n);
  const Eigen::VectorXd g = drift_on_grid(drift, grid);
  const double eg = std::min(0.0, sim::drift_g_exponent(drift));
  if (!(2.0 * eg > -1.0)) throw PreconditionError("Wiener weight needs g in L2, i.e. alpha > -1/2");
  std::optional<frac::EndpointExponents> s;
  if (eg != 0.0) s = frac::EndpointExponents{eg, 0.0, false};
  WeightFunction w{GridFunction(grid, g, s), kernels::Wiener{}, drift};
  if (std::holds_alternative<sim::LinearDrift>(drift)) {
    w.denom = T;
  } else if (const auto* pd = std::get_if<sim::PowerDrift>(&drift)) {
    const double a = pd->alpha;
    w.denom = (a + 1.0) * (a + 1.0) * std::pow(T, 2.0 * a + 1.0) / (2.0 * a + 1.0);
  }
  finalize(w, Eigen::MatrixXd::Identity(grid.size(), grid.size()), g);
  return w;
}

/// Closed-form weight for fBm noise and linear drift.
inline WeightFunction weight_fbm_linear(double hurst, double T, std::size_t n, const WeightOptions& opt = {}) {
  if (!(hurst > 0.5 && hurst < 1.0)) throw ParameterError("fBm weight needs 1/2 < H < 1");
  detail::check_horizon(T);
  const UniformGrid grid(T, n);
  WeightFunction w{fbm_weight_values(hurst, grid), kernels::Fbm{hurst}, sim::LinearDrift{}};
  w.method = WeightMethod::closed_form;
  w.denom = fbm_weight_denom(hurst, T);
  finalize(w, frac::fbm_gamma_matrix(grid, hurst), Eigen::VectorXd::Ones(grid.size()));
  detail::check_residual(w, opt);
  return w;
}

/// W(z) = int_0^{z-1} (v+1)^{alpha-1} v^{1/2-H} dv, z >= 1, computed as
/// int_0^{1-1/z} w^{1/2-H} (1-w)^{H-alpha-3/2} dw by tanh-sinh quadrature.
inline double power_drift_W(double z, double alpha, double hurst) {
  if (!(z >= 1.0)) throw ParameterError("W(z) needs z >= 1");
  if (z == 1.0) return 0.0;
  const double upper = 1.0 - 1.0 / z;
  const double e0 = 0.5 - hurst;
  const double e1 = hurst - alpha - 1.5;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double gap = 1.0 / z;
  // xc is b - w in the upper half of the interval, which keeps 1 - w accurate near the upper end.
  auto f = [&](double w, double xc) {
    const double one_minus = xc > 0.0 ? gap + xc : 1.0 - w;
    return std::pow(w, e0) * std::pow(one_minus, e1);
  };
  return integrator.integrate(f, 0.0, upper);
}

/// Constant of the power-drift weight for g = (alpha+1)t^alpha:
///   (alpha+1)/(H(2H-1)) Gamma(p)cos(pi p/2)/pi Gamma(alpha-H+3/2)/(Gamma(alpha-2H+2)Gamma(3/2-H)),  p = 2-2H.
inline double power_drift_constant(double hurst, double alpha) {
  const double p = 2.0 - 2.0 * hurst;
  const double kernel = std::tgamma(p) * std::cos(boost::math::constants::half_pi<double>() * p) /
                        boost::math::constants::pi<double>();
  return (alpha + 1.0) / (hurst * (2.0 * hurst - 1.0)) * kernel * std::tgamma(alpha - hurst + 1.5) /
         (std::tgamma(alpha - 2.0 * hurst + 2.0) * std::tgamma(1.5 - hurst));
}

/// Weight for fBm noise and drift G(t) = t^{alpha+1}:
///   h(t) = K [T^alpha (t(T-t))^{1/2-H} - alpha t^{alpha+1-2H} W(T/t)].
inline WeightFunction weight_power_drift(double hurst, double alpha, double T, std::size_t n,
                                         const WeightOptions& opt = {}) {
  if (!(hurst > 0.5 && hurst < 1.0)) throw ParameterError("power-drift weight needs 1/2 < H < 1");
  if (!(alpha > 2.0 * hurst - 1.5)) {
    throw PreconditionError("power-drift weight is square integrable only for alpha > 2H - 3/2 (alpha=" +
                            std::to_string(alpha) + ", H=" + std::to_string(hurst) + ")");
  }
  detail::check_horizon(T);
  const UniformGrid grid(T, n);
  const double k = power_drift_constant(hurst, alpha);
  const double e = 0.5 - hurst;
  Eigen::VectorXd h(grid.size());
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.node(i);
    double v = std::pow(T, alpha) * std::pow(t * (T - t), e);
    if (alpha != 0.0) v -= alpha * std::pow(t, alpha + 1.0 - 2.0 * hurst) * power_drift_W(T / t, alpha, hurst);
    h(static_cast<Eigen::Index>(i)) = k * v;
  }
  const double left = std::min(e, alpha + 1.0 - 2.0 * hurst);
  const sim::DriftSpec drift = sim::PowerDrift{alpha};
  const Eigen::VectorXd g = drift_on_grid(drift, grid);
  const Eigen::MatrixXd gamma = frac::fbm_gamma_matrix(grid, hurst);

  const Eigen::VectorXd r = gamma * h;
  const auto [lo, hi] = frac::interior_range(grid.n);
  const double lsq = r.segment(lo, hi - lo).dot(g.segment(lo, hi - lo)) / r.segment(lo, hi - lo).squaredNorm();
  if (opt.constant_policy == ConstantPolicy::least_squares) h *= lsq;

  WeightFunction w{GridFunction(grid, std::move(h), frac::EndpointExponents{left, e, false}), kernels::Fbm{hurst},
                   drift};
  w.method = WeightMethod::power_drift;
  w.lsq_factor = lsq;
  finalize(w, gamma, g);
  detail::check_residual(w, opt);
  return w;
}

/// Mixed Wiener + fBm noise: (I + A) h = g, a second-kind equation.
inline WeightFunction weight_mixed(const kernels::MixedBmFbm& model, const DriftSpec& drift, double T,
                                   std::size_t n, const WeightOptions& opt = {}) {
  kernels::validate(model);
  if (!(model.hurst > 0.5 && model.hurst < 1.0)) throw ParameterError("mixed-model weight needs 1/2 < H < 1");
  detail::check_horizon(T);
  sim::validate(drift);
  const UniformGrid grid(T, n);
  const auto size = grid.size();
  const Eigen::VectorXd g = drift_on_grid(drift, grid);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  if (model.fbm_scale != 0.0) a = model.fbm_scale * frac::fbm_gamma_matrix(grid, model.hurst);
  const Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(size, size) + a;

  WeightFunction w{GridFunction(grid, g), model, drift};
  if (opt.mixed_method == MixedMethod::direct) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(gamma);
    w.h = GridFunction(grid, lu.solve(g));
    w.rcond = lu.rcond();
    w.method = WeightMethod::fredholm_direct;
  } else {
    // (I + A)^{-1} = sum_k (qI - A)^k / (1+q)^{k+1}; q = lambda_max(A)/2 centers
    // the spectrum of A so the ratio stays below 1 for any norm of A.
    const double lambda = a.isZero(0.0) ? 0.0
                                        : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly)
                                              .eigenvalues()
                                              .maxCoeff();
    const double q = 0.5 * lambda;
    Eigen::VectorXd term = g / (1.0 + q);
    Eigen::VectorXd sum = term;
    std::size_t k = 1;
    for (;; ++k) {
      term = (q * term - a * term) / (1.0 + q);
      sum += term;
      if (term.cwiseAbs().maxCoeff() < opt.neumann_tolerance) break;
      if (k >= opt.neumann_max_iterations) {
        std::ostringstream msg;
        msg << "Neumann series did not converge in " << k << " terms (estimated norm of Gamma_H " << lambda
            << ", last increment " << term.cwiseAbs().maxCoeff() << ")";
        throw SolverFailure(msg.str());
      }
    }
    w.h = GridFunction(grid, std::move(sum));
    w.iterations = k + 1;
    w.method = WeightMethod::neumann;
  }
  finalize(w, gamma, g);
  detail::check_residual(w, opt);
  return w;
}

namespace detail {

struct FirstKindSolution {
  Eigen::VectorXd h;
  double rcond;
};

inline FirstKindSolution solve_first_kind(const Eigen::MatrixXd& k, const Eigen::VectorXd& g, double reg) {
  if (reg > 0.0) {
    Eigen::MatrixXd normal = k.transpose() * k;
    normal.diagonal().array() += reg;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(normal);
    return {lu.solve(k.transpose() * g), lu.rcond()};
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
  return {lu.solve(g), lu.rcond()};
}

}  // namespace detail

/// Sub-fBm noise: first-kind equation int K_H(s,t) h(s) ds = g(t), 1/2 < H < 3/4.
inline WeightFunction weight_subfbm(double hurst, const DriftSpec& drift, double T, std::size_t n,
                                    const WeightOptions& opt = {}) {
  if (!(hurst > 0.5 && hurst < 0.75)) {
    throw PreconditionError("sub-fBm weight exists for 1/2 < H < 3/4 only, got H=" + std::to_string(hurst));
  }
  detail::check_horizon(T);
  sim::validate(drift);
  const UniformGrid grid(T, n);
  const Eigen::VectorXd g = drift_on_grid(drift, grid);
  const Eigen::MatrixXd k = frac::subfbm_gamma_matrix(grid, hurst);
  auto sol = detail::solve_first_kind(k, g, opt.regularization);

  const double e = 0.5 - hurst;
  WeightFunction w{GridFunction(grid, sol.h, frac::EndpointExponents{e, e, true}), kernels::SubFbm{hurst}, drift};
  w.method = WeightMethod::fredholm_direct;
  w.rcond = sol.rcond;
  if (opt.check_stability) {
    const UniformGrid fine(T, 2 * n);
    const auto fsol =
        detail::solve_first_kind(frac::subfbm_gamma_matrix(fine, hurst), drift_on_grid(drift, fine), opt.regularization);
    const Eigen::VectorXd pairs =
        0.5 * (Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(fsol.h.data(), grid.size()) +
               Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(fsol.h.data() + 1, grid.size()));
    const double stability = (pairs - sol.h).norm() / sol.h.norm();
    w.refinement_stability = stability;
    if (!(stability <= opt.stability_tolerance)) {
      std::ostringstream msg;
      msg << "sub-fBm first-kind solve is unstable under refinement n=" << n << " -> " << 2 * n
          << ": relative L2 change " << stability << " (reciprocal condition estimate " << sol.rcond << ")";
      throw SolverFailure(msg.str());
    }
  }
  finalize(w, k, g);
  detail::check_residual(w, opt);
  return w;
}

/// Two independent fBm's, H1 < H2: (I + Gamma_{H1}^{-1} Gamma_{H2}) h = Gamma_{H1}^{-1} g.
/// Gamma_{H1}^{-1} is the power-kernel inverse with p = 2 - 2H1 divided by H1(2H1-1).
inline WeightFunction weight_two_fbm(const kernels::TwoFbm& model, const DriftSpec& drift, double T, std::size_t n,
                                     const WeightOptions& opt = {}) {
  kernels::validate(model);
  const double h1 = model.hurst1;
  const double h2 = model.hurst2;
  if (!(h1 > 0.5 && h1 <= 0.75)) throw PreconditionError("two-fBm weight needs 1/2 < H1 <= 3/4");
  if (!(h2 > h1 && h2 < 1.0)) throw PreconditionError("two-fBm weight needs H1 < H2 < 1");
  detail::check_horizon(T);
  sim::validate(drift);
  const UniformGrid grid(T, n);
  const double c1 = h1 * (2.0 * h1 - 1.0);
  const Eigen::VectorXd g = drift_on_grid(drift, grid);

  Eigen::VectorXd rhs;
  const bool linear = std::holds_alternative<sim::LinearDrift>(drift);
  if (linear) {
    rhs = fbm_weight_values(h1, grid).values();
  } else {
    const frac::PowerKernelSolver inverse(grid, 2.0 - 2.0 * h1);
    rhs = inverse.solve(g, std::min(0.0, sim::drift_g_exponent(drift)), 0.0) / c1;
  }

  Eigen::VectorXd h = rhs;
  std::optional<double> rcond;
  if (model.second_scale != 0.0) {
    const Eigen::MatrixXd a2 = model.second_scale * frac::fbm_gamma_matrix(grid, h2);
    const frac::PowerKernelSolver inverse(grid, 2.0 - 2.0 * h1, opt.column_check);
    Eigen::MatrixXd m;
    try {
      m = inverse.solve(a2) / c1;
    } catch (const NonSolvableError& e) {
      throw NonSolvableError(std::string("Gamma_{H1}^{-1} Gamma_{H2} assembly: ") + e.what(), e.residual());
    }
    m.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    h = lu.solve(rhs);
    rcond = lu.rcond();
  }

  const double e = 0.5 - h1;
  WeightFunction w{GridFunction(grid, std::move(h), frac::EndpointExponents{e, e, model.second_scale != 0.0}), model,
                   drift};
  w.method = WeightMethod::second_kind_two_fbm;
  w.rcond = rcond;
  if (linear && model.second_scale == 0.0) w.denom = fbm_weight_denom(h1, T);
  Eigen::MatrixXd gamma = frac::fbm_gamma_matrix(grid, h1);
  if (model.second_scale != 0.0) gamma += model.second_scale * frac::fbm_gamma_matrix(grid, h2);
  finalize(w, gamma, g);
  detail::check_residual(w, opt);
  return w;
}

/// Weight for any supported (model, drift) pair.
inline WeightFunction solve_weight(const NoiseModel& model, const DriftSpec& drift, double T, std::size_t n,
                                   const WeightOptions& opt = {}) {
  kernels::validate(model);
  sim::validate(drift);
  return std::visit(
      [&](const auto& m) -> WeightFunction {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, kernels::Wiener>) {
          return weight_wiener(drift, T, n);
        } else if constexpr (std::is_same_v<M, kernels::Fbm>) {
          if (std::holds_alternative<sim::LinearDrift>(drift)) return weight_fbm_linear(m.hurst, T, n, opt);
          if (const auto* p = std::get_if<sim::PowerDrift>(&drift)) return weight_power_drift(m.hurst, p->alpha, T, n, opt);
          throw UnsupportedParameterError("fBm weights exist for linear and power drifts only");
        } else if constexpr (std::is_same_v<M, kernels::SubFbm>) {
          return weight_subfbm(m.hurst, drift, T, n, opt);
        } else if constexpr (std::is_same_v<M, kernels::MixedBmFbm>) {
          return weight_mixed(m, drift, T, n, opt);
        } else {
          return weight_two_fbm(m, drift, T, n, opt);
        }
      },
      model);
}

}  // namespace gpdrift::weights
