#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gpdrift/estimators/estimate.hpp"
#include "gpdrift/estimators/stats.hpp"
#include "gpdrift/experiments/config.hpp"
#include "gpdrift/experiments/parallel.hpp"
#include "gpdrift/experiments/report.hpp"
#include "gpdrift/frac/properties.hpp"
#include "gpdrift/simulate/refine.hpp"
#include "gpdrift/simulate/sample_path.hpp"
#include "gpdrift/weights/solvers.hpp"

namespace gpdrift::exp {

namespace detail {

inline std::string shortest(double v) { return kernels::detail::shortest(v); }

/// Only numerical failures become error rows; bad parameters stop the run.
template <class F>
void record_solver_errors(Report& rep, const std::string& scheme, double T, std::size_t N, const std::string& metric,
                          F&& body) {
  try {
    body();
  } catch (const Error& e) {
    if (e.exit_code() == ExitCode::config) throw;
    rep.error(scheme, T, N, metric, e);
  }
}

inline weights::WeightOptions weight_options(const ExperimentConfig& c) {
  weights::WeightOptions opt;
  if (c.tolerances.count("weight_residual")) opt.residual_tolerance = c.tol("weight_residual");
  if (c.tolerances.count("residual")) opt.residual_tolerance = c.tol("residual");
  if (c.tolerances.count("stability")) opt.stability_tolerance = c.tol("stability");
  if (c.tolerances.count("column_residual")) opt.column_check.tolerance = c.tol("column_residual");
  return opt;
}

/// Exponent r of Var(theta_hat) ~ T^r for self-similar noise and power-type drift,
/// when the model has one: 2H - 2(alpha+1).
inline std::optional<double> self_similar_rate(const kernels::NoiseModel& model, const sim::DriftSpec& drift) {
  std::optional<double> hurst;
  if (std::holds_alternative<kernels::Wiener>(model)) hurst = 0.5;
  if (const auto* f = std::get_if<kernels::Fbm>(&model)) hurst = f->hurst;
  if (!hurst) return std::nullopt;
  if (std::holds_alternative<sim::LinearDrift>(drift)) return 2.0 * *hurst - 2.0;
  if (const auto* p = std::get_if<sim::PowerDrift>(&drift)) return 2.0 * *hurst - 2.0 * (p->alpha + 1.0);
  return std::nullopt;
}

}  // namespace detail

/// Smooth random test functions on the grid, one per column:
/// sum_{k<6} (a_k cos(k pi x/T) + b_k sin(k pi x/T)) / (1+k), a, b standard normal.
inline Eigen::MatrixXd random_smooth_functions(const frac::UniformGrid& grid, std::size_t count, std::uint64_t seed) {
  constexpr int kModes = 6;
  const double pi = boost::math::constants::pi<double>();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(grid.size(), static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    sim::NormalStream z(sim::derive_stream_seed(seed, j));
    for (int k = 0; k < kModes; ++k) {
      const double a = z.next() / (1.0 + k);
      const double b = z.next() / (1.0 + k);
      for (std::size_t i = 0; i < grid.n; ++i) {
        const double arg = k * pi * grid.node(i) / grid.T;
        f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += a * std::cos(arg) + b * std::sin(arg);
      }
    }
  }
  return f;
}

inline Report run_mc_bias_variance(const ExperimentConfig& c, std::size_t workers) {
  Report rep(c);
  const double T = c.T.front();
  const std::size_t N = c.N.front();
  const std::size_t R = c.replications;
  const auto grid = kernels::TimeGrid::uniform(T, N);
  const sim::PathSampler sampler(c.model, c.drift, grid);

  for (const auto& scheme : c.schemes) {
    detail::record_solver_errors(rep, scheme, T, N, "estimate", [&] {
      std::function<double(const sim::SamplePath&)> estimate;
      double variance = 0.0;
      std::optional<est::DiscreteEstimator> discrete;
      std::optional<weights::WeightFunction> weight;
      if (scheme == "discrete") {
        discrete.emplace(c.model, c.drift, grid);
        variance = discrete->variance();
        estimate = [&](const sim::SamplePath& p) { return discrete->estimate(p).theta_hat; };
      } else {
        weight.emplace(weights::solve_weight(c.model, c.drift, T, N, detail::weight_options(c)));
        variance = weight->variance();
        estimate = [&](const sim::SamplePath& p) { return est::estimate_continuous(p, *weight).theta_hat; };
        rep.info(scheme, T, N, "weight_residual", weight->relative_residual, weights::to_string(weight->method));
        rep.info(scheme, T, N, "weight_denom", weight->denom);
      }
      const auto theta_hat = parallel_map<double>(R, workers, [&](std::size_t i) {
        return estimate(sampler.sample(c.theta, sim::derive_stream_seed(c.master_seed, i)));
      });
      const double m = stats::mean(theta_hat);
      const double sv = stats::sample_variance(theta_hat);
      std::vector<double> z(R);
      for (std::size_t i = 0; i < R; ++i) z[i] = (theta_hat[i] - c.theta) / std::sqrt(variance);
      const double lo = c.tol("variance_ratio_low"), hi = c.tol("variance_ratio_high");

      rep.info(scheme, T, N, "mean", m);
      rep.check(scheme, T, N, "bias", m - c.theta, Comparator::abs_le, 0.0,
                c.tol("bias_sigmas") * std::sqrt(variance / static_cast<double>(R)),
                "tolerance = bias_sigmas * sqrt(analytic_variance / replications)");
      rep.info(scheme, T, N, "sample_variance", sv);
      rep.info(scheme, T, N, "analytic_variance", variance);
      rep.check(scheme, T, N, "variance_ratio", sv / variance, Comparator::abs_le, 0.5 * (lo + hi), 0.5 * (hi - lo),
                "sample_variance / analytic_variance");
      rep.check(scheme, T, N, "ks_statistic", stats::ks_statistic_normal(z), Comparator::le,
                stats::ks_critical(R, c.tol("ks_level")), 0.0, "standardized estimator vs N(0 1)");
    });
  }
  return rep;
}

inline Report run_consistency_sweep(const ExperimentConfig& c, std::size_t workers) {
  Report rep(c);
  const std::size_t K = c.T.size();
  std::vector<double> diag(K);
  for (std::size_t k = 0; k < K; ++k) diag[k] = est::consistency_diagnostic(c.model, c.drift, c.T[k]);
  for (std::size_t k = 1; k < K; ++k) {
    if (!(diag[k] < diag[k - 1])) {
      throw ConfigError("consistency hypothesis Var B_t / G(t)^2 -> 0 is not supported by the sweep: the ratio does "
                        "not decrease from T=" + detail::shortest(c.T[k - 1]) + " to T=" + detail::shortest(c.T[k]));
    }
  }

  std::vector<double> analytic(K), mse(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double T = c.T[k];
    const std::size_t N = c.N.size() == 1 ? c.N.front() : c.N[k];
    const auto grid = kernels::TimeGrid::uniform(T, N);
    const sim::PathSampler sampler(c.model, c.drift, grid);
    const est::DiscreteEstimator estimator(c.model, c.drift, grid);
    const auto err = parallel_map<double>(c.replications, workers, [&](std::size_t i) {
      const auto seed = sim::derive_stream_seed(sim::derive_stream_seed(c.master_seed, k), i);
      return estimator.estimate(sampler.sample(c.theta, seed)).theta_hat - c.theta;
    });
    analytic[k] = estimator.variance();
    mse[k] = stats::mean_square(err);
    rep.info("discrete", T, N, "consistency_diagnostic", diag[k], "Var B_T / G(T)^2");
    rep.info("discrete", T, N, "analytic_variance", analytic[k]);
    rep.info("discrete", T, N, "mse", mse[k]);
    rep.info("discrete", T, N, "mse_over_analytic", mse[k] / analytic[k]);
    if (k > 0) {
      rep.check("discrete", T, N, "analytic_variance_decrease", analytic[k], Comparator::lt, analytic[k - 1], 0.0,
                "reference = previous horizon");
      rep.check("discrete", T, N, "mse_decrease", mse[k], Comparator::lt, mse[k - 1], 0.0,
                "reference = previous horizon");
    }
  }
  const double a_slope = stats::log_log_slope(c.T, analytic);
  const double e_slope = stats::log_log_slope(c.T, mse);
  const double T_last = c.T.back();
  const std::size_t N_last = c.N.back();
  if (const auto rate = detail::self_similar_rate(c.model, c.drift)) {
    rep.check("discrete", T_last, N_last, "analytic_slope", a_slope, Comparator::abs_le, *rate,
              c.tol("analytic_slope"), "log-log slope of analytic variance vs T");
    rep.check("discrete", T_last, N_last, "empirical_slope", e_slope, Comparator::abs_le, *rate,
              c.tol("empirical_slope"), "log-log slope of empirical MSE vs T");
  } else {
    rep.info("discrete", T_last, N_last, "analytic_slope", a_slope, "no closed-form rate for this model");
    rep.info("discrete", T_last, N_last, "empirical_slope", e_slope, "no closed-form rate for this model");
  }
  return rep;
}

inline Report run_discrete_to_continuous(const ExperimentConfig& c, std::size_t workers) {
  Report rep(c);
  const double T = c.T.front();
  const std::size_t fine = *c.fine_N;
  const auto& Ns = c.N;
  const auto coarse = kernels::TimeGrid::uniform(T, Ns.front());
  const sim::PathSampler sampler(c.model, c.drift, coarse);
  const sim::PathRefiner refiner(c.model, c.drift, coarse, fine / Ns.front());
  const auto weight = weights::solve_weight(c.model, c.drift, T, fine, detail::weight_options(c));
  std::vector<est::DiscreteEstimator> discrete;
  for (auto n : Ns) discrete.emplace_back(c.model, c.drift, kernels::TimeGrid::uniform(T, n));

  // Per replication: theta_T - theta, then theta^(N) - theta_T for each N.
  const auto diffs = parallel_map<std::vector<double>>(c.replications, workers, [&](std::size_t i) {
    const auto seed = sim::derive_stream_seed(c.master_seed, i);
    const auto path = refiner.refine(sampler.sample(c.theta, seed), sim::derive_stream_seed(seed, 1));
    const double cont = est::estimate_continuous(path, weight).theta_hat;
    std::vector<double> d{cont - c.theta};
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      d.push_back(discrete[k].estimate(path.restrict_every(fine / Ns[k])).theta_hat - cont);
    }
    return d;
  });

  auto column = [&](std::size_t k) {
    std::vector<double> v(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) v[i] = diffs[i][k];
    return v;
  };
  rep.info("continuous", T, fine, "weight_residual", weight.relative_residual, weights::to_string(weight.method));
  rep.info("continuous", T, fine, "mse", stats::mean_square(column(0)), "continuous estimator vs theta");
  rep.info("continuous", T, fine, "analytic_variance", weight.variance());

  const bool exact = std::holds_alternative<kernels::Wiener>(c.model) && std::holds_alternative<sim::LinearDrift>(c.drift);
  std::vector<double> gap(Ns.size());
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    gap[k] = stats::mean_square(column(k + 1));
    if (exact) {
      rep.check("discrete", T, Ns[k], "gap", gap[k], Comparator::le, 0.0, c.tol("exact_floor"),
                "both estimators equal X_T/T; tolerance is a roundoff floor");
      continue;
    }
    rep.info("discrete", T, Ns[k], "gap", gap[k], "mean square of theta^(N) - theta_T");
    if (k > 0) {
      rep.check("discrete", T, Ns[k], "gap_decrease", gap[k], Comparator::lt, gap[k - 1], 0.0,
                "reference = previous N");
    }
  }
  if (!exact) {
    rep.check("discrete", T, Ns.back(), "final_gap", gap.back(), Comparator::le, 0.0, c.tol("final_gap"));
  }
  return rep;
}

inline Report run_weight_residual(const ExperimentConfig& c, std::size_t /*workers*/) {
  Report rep(c);
  const double T = c.T.front();
  const bool mixed = std::holds_alternative<kernels::MixedBmFbm>(c.model);
  const std::vector<std::string> schemes = mixed ? c.schemes : std::vector<std::string>{"default"};
  // residual per (scheme, n) for the refinement rows.
  std::map<std::string, std::map<std::size_t, double>> residuals;

  for (std::size_t n : c.N) {
    std::map<std::string, Eigen::VectorXd> solutions;
    for (const auto& scheme : schemes) {
      auto opt = detail::weight_options(c);
      if (scheme == "neumann") opt.mixed_method = weights::MixedMethod::neumann;
      detail::record_solver_errors(rep, scheme, T, n, "weight", [&] {
        const auto w = weights::solve_weight(c.model, c.drift, T, n, opt);
        const std::string label = mixed ? scheme : weights::to_string(w.method);
        rep.check(label, T, n, "residual", w.relative_residual, Comparator::le, 0.0, c.tol("residual"),
                  "max interior |Gamma h - g| / |g|");
        rep.check(label, T, n, "denom", w.denom, Comparator::gt, 0.0, 0.0, "int g h");
        const double agreement = std::abs(w.denom - w.denom_midpoint) / w.denom;
        if (n >= 512) {
          rep.check(label, T, n, "denom_agreement", agreement, Comparator::le, 0.0, c.tol("denom_agreement"),
                    "singularity-aware vs midpoint denominator");
        } else {
          rep.info(label, T, n, "denom_agreement", agreement, "checked for n >= 512");
        }
        if (w.refinement_stability) {
          rep.check(label, T, n, "refinement_stability", *w.refinement_stability, Comparator::le, 0.0,
                    c.tol("stability"), "relative L2 change n -> 2n");
        }
        if (w.rcond) rep.info(label, T, n, "rcond", *w.rcond);
        if (w.iterations) rep.info(label, T, n, "iterations", static_cast<double>(*w.iterations));
        if (w.lsq_factor) rep.info(label, T, n, "lsq_factor", *w.lsq_factor);
        residuals[label][n] = w.relative_residual;
        solutions[scheme] = w.h.values();
      });
    }
    if (solutions.count("direct") && solutions.count("neumann")) {
      rep.check("neumann", T, n, "method_agreement", (solutions["direct"] - solutions["neumann"]).cwiseAbs().maxCoeff(),
                Comparator::le, 0.0, c.tol("method_agreement"), "max |h_direct - h_neumann|");
    }
  }
  for (const auto& [label, by_n] : residuals) {
    for (const auto& [n, r] : by_n) {
      const auto it = by_n.find(2 * n);
      if (it == by_n.end()) continue;
      rep.check(label, T, 2 * n, "residual_refinement", it->second, Comparator::le, r, c.tol("refinement_floor"),
                "reference = residual at n/2; tolerance is a roundoff floor");
    }
  }
  return rep;
}

inline Report run_operator_properties(const ExperimentConfig& c, std::size_t /*workers*/) {
  namespace prop = frac::properties;
  Report rep(c);
  const double T = c.T.front();
  const std::size_t n = c.N.front();
  const frac::UniformGrid grid(T, n);
  const Eigen::MatrixXd f = random_smooth_functions(grid, c.replications, c.master_seed);
  const Eigen::MatrixXd g = random_smooth_functions(grid, c.replications, sim::splitmix64(c.master_seed));
  using detail::shortest;
  const std::string s = "collocation";
  const std::string x = "exact";

  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.1, 0.1}, {0.1, 0.25}, {0.25, 0.25}, {0.1, 0.5}, {0.25, 0.5}, {0.5, 0.5}}) {
    rep.check(s, T, n, "semigroup(a=" + shortest(a) + ";b=" + shortest(b) + ")", prop::semigroup_error(grid, a, b, f),
              Comparator::le, 0.0, c.tol("semigroup"), "max ||I^a I^b f - I^(a+b) f|| / ||f||");
  }
  for (double a : {0.1, 0.25, 0.4, 0.5}) {
    rep.check(x, T, n, "positivity(a=" + shortest(a) + ")", prop::positivity_min(grid, a, f), Comparator::ge, 0.0,
              c.tol("positivity"), "min <I^a_0+ f, I^a_T- f> / ||f||^2");
  }
  rep.check(x, T, n, "half_identity", prop::half_identity_error(grid, f), Comparator::le, 0.0, c.tol("half_identity"),
            "max relative error of <I^1/2_0+ f, I^1/2_T- f> = (int f)^2 / 2");
  for (double h : {0.55, 0.6, 0.65, 0.7, 0.75}) {
    rep.check(s, T, n, "norm_inequality(H=" + shortest(h) + ")", prop::norm_inequality_excess(grid, h, f),
              Comparator::le, 0.0, c.tol("norm_inequality"), "max (|a|+|b|) / (sqrt2 |a+b|) - 1");
  }
  for (double a : {0.2, 0.5, 0.8}) {
    rep.check(s, T, n, "adjointness(a=" + shortest(a) + ")", prop::adjointness_error(grid, a, f, g), Comparator::le,
              0.0, c.tol("adjointness"), "max |<I_0+ f, g> - <f, I_T- g>| / (||I_0+ f|| ||g||)");
  }
  for (double h : {0.6, 0.7, 0.75, 0.9}) {
    rep.check(s, T, n, "operator_identity(H=" + shortest(h) + ")", prop::operator_identity_error(grid, h, f),
              Comparator::le, 0.0, c.tol("operator_identity"), "Gamma_H vs H Gamma(2H) (I_0+ + I_T-)");
  }
  return rep;
}

inline Report run_experiment(const ExperimentConfig& c, std::size_t workers = 1) {
  switch (c.experiment) {
    case ExperimentKind::mc_bias_variance: return run_mc_bias_variance(c, workers);
    case ExperimentKind::consistency_sweep: return run_consistency_sweep(c, workers);
    case ExperimentKind::discrete_to_continuous: return run_discrete_to_continuous(c, workers);
    case ExperimentKind::weight_residual: return run_weight_residual(c, workers);
    case ExperimentKind::operator_properties: return run_operator_properties(c, workers);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace gpdrift::exp
