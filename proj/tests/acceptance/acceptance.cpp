// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "gpdrift/experiments.hpp"
#include "gpdrift/frac.hpp"
#include "gpdrift/weights.hpp"

using namespace gpdrift;
using namespace gpdrift::exp;
using nlohmann::json;

namespace {

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string base_metric(const std::string& metric) { return metric.substr(0, metric.find('(')); }

/// Every row whose base metric is listed must pass, and each listed metric must
/// occur at least once; errors anywhere fail.
void require_rows(Verdict& v, const Report& r, const std::set<std::string>& metrics, const std::string& label) {
  std::set<std::string> seen;
  for (const auto& row : r.rows()) {
    if (row.comparator == Comparator::error) v.require(false, label + " " + row.scheme + " error: " + row.note);
    if (!metrics.count(base_metric(row.metric))) continue;
    seen.insert(base_metric(row.metric));
    if (!row.pass) {
      v.require(false, label + " " + row.scheme + " N=" + std::to_string(row.N) + " " + row.metric + "=" +
                           format_double(row.value));
    }
  }
  for (const auto& m : metrics) v.require(seen.count(m) > 0, label + " has no " + m + " rows");
}

double row_value(const Report& r, const std::string& scheme, const std::string& metric) {
  for (const auto& row : r.rows()) {
    if (row.scheme == scheme && row.metric == metric) return row.value;
  }
  return std::nan("");
}

double worst(const Report& r, const std::string& metric) {
  double w = -INFINITY;
  for (const auto& row : r.rows()) {
    if (base_metric(row.metric) == metric) w = std::max(w, row.value);
  }
  return w;
}

double max_rel_interior(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto [lo, hi] = frac::interior_range(static_cast<std::size_t>(a.size()));
  double e = 0.0;
  for (Eigen::Index i = lo; i < hi; ++i) e = std::max(e, std::abs(a(i) - b(i)) / std::abs(b(i)));
  return e;
}

/// max interior |Gamma h - g| with h held piecewise constant on a grid refined k times,
/// so the operator is not the matrix the solver factorized.
double refined_residual(const kernels::NoiseModel& m, const weights::WeightFunction& w, std::size_t k = 4) {
  const frac::UniformGrid fine(w.grid().T, w.grid().n * k);
  Eigen::VectorXd h(static_cast<Eigen::Index>(fine.n));
  for (std::size_t i = 0; i < fine.n; ++i) h(static_cast<Eigen::Index>(i)) = w.h.values()(static_cast<Eigen::Index>(i / k));
  return frac::max_interior_error(frac::apply_gamma(m, frac::GridFunction(fine, h)).values(),
                                  weights::drift_on_grid(w.drift, fine));
}

json mc_config(const json& model, std::size_t reps) {
  return {{"experiment", "mc-bias-variance"},
          {"model", model},
          {"drift", {{"type", "linear"}}},
          {"theta", 1.0},
          {"T", 8.0},
          {"N", 64},
          {"replications", reps},
          {"master_seed", 20240601},
          {"output_path", "acceptance.csv"}};
}

Verdict criterion_1() {
  Verdict v;
  const std::vector<json> models{
      {{"type", "wiener"}},           {{"type", "fbm"}, {"H", 0.6}},    {{"type", "fbm"}, {"H", 0.75}},
      {{"type", "sub_fbm"}, {"H", 0.6}}, {{"type", "mixed"}, {"H", 0.7}}, {{"type", "two_fbm"}, {"H1", 0.6}, {"H2", 0.8}}};
  for (const auto& m : models) {
    const auto c = parse_config(mc_config(m, 10000));
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_experiment(c, workers());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto name = kernels::describe(c.model);
    require_rows(v, r, {"bias", "variance_ratio"}, name);
    v.require(secs <= 180.0, name + " runtime");
    v.detail << " " << name << ": ratio " << row_value(r, "discrete", "variance_ratio");
  }
  return v;
}

Verdict criterion_2() {
  Verdict v;
  auto j = mc_config({{"type", "fbm"}, {"H", 0.75}}, 10000);
  j["schemes"] = {"discrete", "continuous"};
  const auto r = run_experiment(parse_config(j), workers());
  require_rows(v, r, {"ks_statistic"}, "fbm(0.75)");
  v.detail << " KS discrete " << row_value(r, "discrete", "ks_statistic") << ", continuous "
           << row_value(r, "continuous", "ks_statistic") << " (critical " << stats::ks_critical(10000) << ")";
  return v;
}

Verdict criterion_3() {
  Verdict v;
  for (double H : {0.6, 0.7, 0.75}) {
    for (auto [n, tol] : {std::pair<std::size_t, double>{512, 2e-2}, {1024, 1e-2}}) {
      const auto w = weights::weight_fbm_linear(H, 1.0, n);
      const double e = frac::max_interior_error(frac::apply_gamma(kernels::Fbm{H}, w.h).values(),
                                                Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
      v.require(e <= tol, "H=" + format_double(H) + " n=" + std::to_string(n));
      if (n == 1024) v.detail << " H=" << H << ": " << e;
    }
  }
  return v;
}

Verdict criterion_4() {
  Verdict v;
  const kernels::MixedBmFbm m{0.7};
  weights::WeightOptions direct, neumann;
  direct.residual_tolerance = neumann.residual_tolerance = 2e-2;
  neumann.mixed_method = weights::MixedMethod::neumann;
  const auto a = weights::weight_mixed(m, sim::LinearDrift{}, 1.0, 256, direct);
  const auto b = weights::weight_mixed(m, sim::LinearDrift{}, 1.0, 256, neumann);
  const double agree = (a.h.values() - b.h.values()).cwiseAbs().maxCoeff();
  v.require(agree <= 1e-8, "agreement");
  const double fine = refined_residual(m, a);
  v.require(a.residual <= 2e-2 && b.residual <= 2e-2, "residual");
  v.require(fine <= 2e-2, "refined-grid residual");
  v.detail << " agreement " << agree << ", residual " << a.residual << ", refined-grid residual " << fine;
  return v;
}

Verdict criterion_5() {
  Verdict v;
  weights::WeightOptions opt;
  opt.residual_tolerance = 3e-2;
  opt.stability_tolerance = 5e-2;
  const auto w = weights::weight_subfbm(0.6, sim::LinearDrift{}, 1.0, 512, opt);
  const double fine = refined_residual(kernels::SubFbm{0.6}, w);
  v.require(w.residual <= 3e-2, "residual");
  v.require(fine <= 3e-2, "refined-grid residual");
  v.require(w.refinement_stability && *w.refinement_stability <= 5e-2, "stability");
  bool rejected = false;
  try {
    (void)weights::weight_subfbm(0.75, sim::LinearDrift{}, 1.0, 64);
  } catch (const PreconditionError&) {
    rejected = true;
  }
  v.require(rejected, "H=0.75 rejection");
  v.detail << " residual " << w.residual << ", refined-grid residual " << fine << ", stability "
           << w.refinement_stability.value_or(NAN);
  return v;
}

Verdict criterion_6() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto w = weights::weight_two_fbm(kernels::TwoFbm{0.6, 0.8}, sim::LinearDrift{}, 1.0, 256);
  const Eigen::VectorXd sum =
      frac::apply_gamma(kernels::Fbm{0.6}, w.h).values() + frac::apply_gamma(kernels::Fbm{0.8}, w.h).values();
  const double res = frac::max_interior_error(sum, Eigen::VectorXd::Ones(256));
  const auto d = weights::weight_two_fbm(kernels::TwoFbm{0.6, 0.8, 0.0}, sim::LinearDrift{}, 1.0, 256);
  const auto f = weights::weight_fbm_linear(0.6, 1.0, 256);
  const double degen = (d.h.values() - f.h.values()).cwiseAbs().maxCoeff();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double fine = refined_residual(kernels::TwoFbm{0.6, 0.8}, w);
  v.require(res <= 5e-2, "residual");
  v.require(fine <= 5e-2, "refined-grid residual");
  v.require(degen <= 1e-6, "degenerate limit");
  v.require(secs <= 300.0, "runtime");
  v.detail << " residual " << res << ", refined-grid residual " << fine << ", degenerate " << degen;
  return v;
}

Verdict criterion_7() {
  Verdict v;
  const frac::UniformGrid g(1.0, 1024);
  const auto one = frac::GridFunction::constant(g, 1.0);
  for (double p : {0.2, 0.4, 0.6}) {
    const auto y = frac::power_kernel_solve(one, p, 1.0);
    const double e = frac::max_interior_error(frac::power_kernel_matrix(g, p) * y.values(), one.values());
    v.require(e <= 2e-2, "p=" + format_double(p));
    v.detail << " p=" << p << ": " << e;
  }
  // The fBm kernel |t-s|^{2H-2} is the power kernel with p = 2 - 2H.
  for (double p : {0.2, 0.4, 0.6}) {
    const double H = 1.0 - p / 2.0;
    const auto y = frac::power_kernel_solve(one, p, 1.0);
    const auto w = weights::weight_fbm_linear(H, 1.0, g.n);
    const double e = max_rel_interior(y.values() / (H * (2 * H - 1)), w.h.values());
    v.require(e <= 2e-2, "closed form H=" + format_double(H));
    v.detail << " closed-form H=" << H << ": " << e;
  }
  return v;
}

Verdict criterion_8() {
  Verdict v;
  const json j{{"experiment", "operator-properties"},
               {"model", {{"type", "wiener"}}},
               {"drift", {{"type", "linear"}}},
               {"theta", 1.0},
               {"T", 1.0},
               {"N", 1024},
               {"replications", 200},
               {"master_seed", 77},
               {"output_path", "ops.csv"}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment(parse_config(j), workers());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require_rows(v, r, {"semigroup", "positivity", "half_identity", "norm_inequality", "adjointness"}, "ops");
  v.require(secs <= 60.0, "runtime");
  v.detail << " semigroup " << worst(r, "semigroup") << ", adjointness " << worst(r, "adjointness") << ", "
           << secs << " s";
  return v;
}

json sweep_config(const json& model) {
  return {{"experiment", "consistency-sweep"},
          {"model", model},
          {"drift", {{"type", "linear"}}},
          {"theta", 1.0},
          {"T_sweep", {4, 8, 16, 32, 64}},
          {"N_sweep", {64, 128, 256, 512, 1024}},
          {"replications", 1000},
          {"master_seed", 31337},
          {"output_path", "consistency.csv"}};
}

Verdict criterion_9() {
  Verdict v;
  const auto fbm = run_experiment(parse_config(sweep_config({{"type", "fbm"}, {"H", 0.7}})), workers());
  require_rows(v, fbm, {"analytic_slope", "empirical_slope"}, "fbm(0.7)");
  auto wj = sweep_config({{"type", "wiener"}});
  wj["tolerances"] = {{"empirical_slope", 0.1}};
  const auto wiener = run_experiment(parse_config(wj), workers());
  require_rows(v, wiener, {"analytic_slope", "empirical_slope"}, "wiener");
  v.detail << " fbm analytic " << row_value(fbm, "discrete", "analytic_slope") << ", empirical "
           << row_value(fbm, "discrete", "empirical_slope") << "; wiener empirical "
           << row_value(wiener, "discrete", "empirical_slope");
  return v;
}

Verdict criterion_10() {
  Verdict v;
  for (const json& m : {json{{"type", "fbm"}, {"H", 0.7}}, json{{"type", "mixed"}, {"H", 0.7}}, json{{"type", "wiener"}}}) {
    const json j{{"experiment", "discrete-to-continuous"},
                 {"model", m},
                 {"drift", {{"type", "linear"}}},
                 {"theta", 1.0},
                 {"T", 1.0},
                 {"N_sweep", {16, 32, 64, 128, 256}},
                 {"fine_N", 1024},
                 {"replications", 1000},
                 {"master_seed", 4242},
                 {"output_path", "d2c.csv"}};
    const auto c = parse_config(j);
    const auto r = run_experiment(c, workers());
    const auto name = kernels::describe(c.model);
    if (std::holds_alternative<kernels::Wiener>(c.model)) {
      require_rows(v, r, {"gap"}, name);
      v.detail << " " << name << " worst gap " << worst(r, "gap");
    } else {
      require_rows(v, r, {"gap", "gap_decrease", "final_gap"}, name);
      v.detail << " " << name << " final gap " << row_value(r, "discrete", "final_gap");
    }
  }
  return v;
}

Verdict criterion_11() {
  Verdict v;
  auto j = mc_config({{"type", "mixed"}, {"H", 0.7}}, 2000);
  j["schemes"] = {"discrete", "continuous"};
  const auto c = parse_config(j);
  const auto a = csv_string(run_experiment(c, 1));
  const auto b = csv_string(run_experiment(c, 1));
  const auto d = csv_string(run_experiment(c, 3));
  v.require(a == b, "repeated run");
  v.require(a == d, "1 vs 3 workers");
  v.detail << " " << a.size() << " bytes compared";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"unbiasedness and exact variance, six models", criterion_1},
      {"normality of the standardized estimator", criterion_2},
      {"closed-form fBm weight", criterion_3},
      {"mixed-model direct vs Neumann weights", criterion_4},
      {"sub-fBm weight", criterion_5},
      {"two-fBm weight", criterion_6},
      {"power-kernel inversion", criterion_7},
      {"fractional operator identities", criterion_8},
      {"consistency rates", criterion_9},
      {"discrete to continuous gap", criterion_10},
      {"determinism across runs and workers", criterion_11},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += v.pass ? 0 : 1;
    std::printf("[%s] criterion %zu: %s (%.1f s)%s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
