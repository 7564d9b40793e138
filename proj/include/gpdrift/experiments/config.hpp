#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpdrift/error.hpp"
#include "gpdrift/kernels/noise_model.hpp"
#include "gpdrift/simulate/drift.hpp"

namespace gpdrift::exp {

using nlohmann::json;

enum class ExperimentKind { mc_bias_variance, consistency_sweep, discrete_to_continuous, weight_residual, operator_properties };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mc_bias_variance: return "mc-bias-variance";
    case ExperimentKind::consistency_sweep: return "consistency-sweep";
    case ExperimentKind::discrete_to_continuous: return "discrete-to-continuous";
    case ExperimentKind::weight_residual: return "weight-residual";
    case ExperimentKind::operator_properties: return "operator-properties";
  }
  return "unknown";
}

/// CLI subcommand of each experiment.
inline std::string subcommand(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mc_bias_variance: return "mc";
    case ExperimentKind::consistency_sweep: return "consistency";
    case ExperimentKind::discrete_to_continuous: return "d2c";
    case ExperimentKind::weight_residual: return "residual";
    case ExperimentKind::operator_properties: return "ops";
  }
  return "unknown";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::mc_bias_variance, ExperimentKind::consistency_sweep,
                 ExperimentKind::discrete_to_continuous, ExperimentKind::weight_residual,
                 ExperimentKind::operator_properties}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

/// Tolerance keys accepted by each experiment, with defaults.
inline std::map<std::string, double> default_tolerances(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mc_bias_variance:
      return {{"bias_sigmas", 3.0}, {"variance_ratio_low", 0.96}, {"variance_ratio_high", 1.04},
              {"ks_level", 0.01}, {"weight_residual", 5e-2}};
    case ExperimentKind::consistency_sweep:
      return {{"analytic_slope", 0.05}, {"empirical_slope", 0.2}};
    case ExperimentKind::discrete_to_continuous:
      return {{"final_gap", 1e-2}, {"exact_floor", 1e-24}, {"weight_residual", 5e-2}};
    case ExperimentKind::weight_residual:
      return {{"residual", 5e-2}, {"stability", 5e-2}, {"refinement_floor", 1e-9}, {"denom_agreement", 1e-2},
              {"method_agreement", 1e-8}, {"column_residual", 0.3}};
    case ExperimentKind::operator_properties:
      return {{"semigroup", 1e-3}, {"positivity", 1e-10}, {"half_identity", 1e-8}, {"norm_inequality", 1e-8},
              {"adjointness", 1e-8}, {"operator_identity", 1e-6}};
  }
  return {};
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::mc_bias_variance;
  kernels::NoiseModel model;
  sim::DriftSpec drift;
  double theta = 0.0;
  std::vector<double> T;
  std::vector<std::size_t> N;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  std::string output_path;
  std::map<std::string, double> tolerances;
  std::vector<std::string> schemes;
  std::optional<std::size_t> fine_N;

  double tol(const std::string& key) const { return tolerances.at(key); }
};

namespace detail {

inline void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

inline const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing required key '" + key + "' in " + where);
  return j.at(key);
}

inline double real(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1) throw ConfigError(what + " must be an integer >= 1");
  return static_cast<std::size_t>(j.get<std::int64_t>());
}

inline kernels::NoiseModel parse_model(const json& j) {
  const std::string where = "model";
  if (!j.is_object()) throw ConfigError("model must be a JSON object");
  const json& type = need(j, "type", where);
  if (!type.is_string()) throw ConfigError("model.type must be a string");
  const auto t = type.get<std::string>();
  kernels::NoiseModel m;
  if (t == "wiener") {
    only_keys(j, {"type"}, where);
    m = kernels::Wiener{};
  } else if (t == "fbm") {
    only_keys(j, {"type", "H"}, where);
    m = kernels::Fbm{real(need(j, "H", where), "model.H")};
  } else if (t == "sub_fbm") {
    only_keys(j, {"type", "H"}, where);
    m = kernels::SubFbm{real(need(j, "H", where), "model.H")};
  } else if (t == "mixed") {
    only_keys(j, {"type", "H", "fbm_scale"}, where);
    kernels::MixedBmFbm mm{real(need(j, "H", where), "model.H")};
    if (j.contains("fbm_scale")) mm.fbm_scale = real(j.at("fbm_scale"), "model.fbm_scale");
    m = mm;
  } else if (t == "two_fbm") {
    only_keys(j, {"type", "H1", "H2", "second_scale"}, where);
    kernels::TwoFbm mm{real(need(j, "H1", where), "model.H1"), real(need(j, "H2", where), "model.H2")};
    if (j.contains("second_scale")) mm.second_scale = real(j.at("second_scale"), "model.second_scale");
    m = mm;
  } else {
    throw ConfigError("unknown model type '" + t + "' (wiener, fbm, sub_fbm, mixed, two_fbm)");
  }
  kernels::validate(m);
  return m;
}

inline sim::DriftSpec parse_drift(const json& j) {
  const std::string where = "drift";
  if (!j.is_object()) throw ConfigError("drift must be a JSON object");
  const json& type = need(j, "type", where);
  if (!type.is_string()) throw ConfigError("drift.type must be a string");
  const auto t = type.get<std::string>();
  if (t == "linear") {
    only_keys(j, {"type"}, where);
    return sim::LinearDrift{};
  }
  if (t == "power") {
    only_keys(j, {"type", "alpha"}, where);
    sim::DriftSpec d = sim::PowerDrift{real(need(j, "alpha", where), "drift.alpha")};
    sim::validate(d);
    return d;
  }
  if (t == "tabulated") {
    only_keys(j, {"type", "nodes", "g"}, where);
    const json& nodes = need(j, "nodes", where);
    const json& g = need(j, "g", where);
    if (!nodes.is_array() || !g.is_array()) throw ConfigError("drift.nodes and drift.g must be arrays");
    std::vector<double> nv, gv;
    for (const auto& v : nodes) nv.push_back(real(v, "drift.nodes[]"));
    for (const auto& v : g) gv.push_back(real(v, "drift.g[]"));
    return sim::TabulatedDrift(std::move(nv), std::move(gv));
  }
  throw ConfigError("unknown drift type '" + t + "' (linear, power, tabulated)");
}

template <class T, class F>
std::vector<T> sweep(const json& j, const std::string& key, F&& convert) {
  if (!j.is_array() || j.empty()) throw ConfigError(key + " must be a nonempty array");
  std::vector<T> out;
  for (const auto& v : j) out.push_back(convert(v, key + "[]"));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConfigError(key + " must be strictly increasing");
  }
  return out;
}

}  // namespace detail

/// Parses and validates a configuration document. Unknown keys anywhere are errors.
inline ExperimentConfig parse_config(const json& j) {
  using namespace detail;
  only_keys(j,
            {"experiment", "model", "drift", "theta", "T", "T_sweep", "N", "N_sweep", "replications", "master_seed",
             "output_path", "tolerances", "schemes", "fine_N"},
            "config");
  ExperimentConfig c;
  const json& e = need(j, "experiment", "config");
  if (!e.is_string()) throw ConfigError("experiment must be a string");
  c.experiment = parse_kind(e.get<std::string>());
  try {
    c.model = parse_model(need(j, "model", "config"));
    c.drift = parse_drift(need(j, "drift", "config"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(err.what());
  }
  c.theta = real(need(j, "theta", "config"), "theta");

  if (j.contains("T") == j.contains("T_sweep")) throw ConfigError("exactly one of 'T' and 'T_sweep' is required");
  if (j.contains("T")) {
    c.T = {real(j.at("T"), "T")};
  } else {
    c.T = sweep<double>(j.at("T_sweep"), "T_sweep", real);
  }
  for (double t : c.T) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("horizons must be positive and finite");
  }
  if (j.contains("N") == j.contains("N_sweep")) throw ConfigError("exactly one of 'N' and 'N_sweep' is required");
  if (j.contains("N")) {
    c.N = {count(j.at("N"), "N")};
  } else {
    c.N = sweep<std::size_t>(j.at("N_sweep"), "N_sweep", count);
  }

  c.replications = count(need(j, "replications", "config"), "replications");
  const json& seed = need(j, "master_seed", "config");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    throw ConfigError("master_seed must be an unsigned 64-bit integer");
  }
  c.master_seed = seed.get<std::uint64_t>();
  const json& out = need(j, "output_path", "config");
  if (!out.is_string() || out.get<std::string>().empty()) throw ConfigError("output_path must be a nonempty string");
  c.output_path = out.get<std::string>();

  c.tolerances = default_tolerances(c.experiment);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!c.tolerances.count(key)) {
        throw ConfigError("unknown tolerance '" + key + "' for experiment " + to_string(c.experiment));
      }
      c.tolerances[key] = real(value, "tolerances." + key);
    }
  }

  if (j.contains("schemes")) {
    const json& s = j.at("schemes");
    if (!s.is_array() || s.empty()) throw ConfigError("schemes must be a nonempty array");
    std::set<std::string> allowed;
    if (c.experiment == ExperimentKind::mc_bias_variance) allowed = {"discrete", "continuous"};
    if (c.experiment == ExperimentKind::weight_residual) allowed = {"direct", "neumann"};
    for (const auto& v : s) {
      if (!v.is_string() || !allowed.count(v.get<std::string>())) {
        throw ConfigError("invalid scheme " + v.dump() + " for experiment " + to_string(c.experiment));
      }
      c.schemes.push_back(v.get<std::string>());
    }
  }
  if (j.contains("fine_N")) {
    if (c.experiment != ExperimentKind::discrete_to_continuous) {
      throw ConfigError("fine_N applies to discrete-to-continuous only");
    }
    c.fine_N = count(j.at("fine_N"), "fine_N");
  }

  switch (c.experiment) {
    case ExperimentKind::mc_bias_variance:
      if (c.T.size() != 1 || c.N.size() != 1) throw ConfigError("mc-bias-variance takes a single T and N");
      if (c.schemes.empty()) c.schemes = {"discrete"};
      if (c.replications < 2) throw ConfigError("mc-bias-variance needs replications >= 2");
      break;
    case ExperimentKind::consistency_sweep:
      if (c.T.size() < 2) throw ConfigError("consistency-sweep needs a T_sweep with >= 2 horizons");
      if (c.N.size() != 1 && c.N.size() != c.T.size()) {
        throw ConfigError("consistency-sweep needs a single N or an N_sweep paired with T_sweep");
      }
      break;
    case ExperimentKind::discrete_to_continuous:
      if (c.T.size() != 1) throw ConfigError("discrete-to-continuous takes a single T");
      if (!c.fine_N) throw ConfigError("discrete-to-continuous needs fine_N");
      for (auto n : c.N) {
        if (*c.fine_N % n != 0 || *c.fine_N / n < 2) {
          throw ConfigError("fine_N must be a multiple (>= 2x) of every N in the sweep");
        }
      }
      break;
    case ExperimentKind::weight_residual:
      if (c.T.size() != 1) throw ConfigError("weight-residual takes a single T");
      if (c.schemes.empty()) c.schemes = {"direct"};
      break;
    case ExperimentKind::operator_properties:
      if (c.T.size() != 1 || c.N.size() != 1) throw ConfigError("operator-properties takes a single T and N");
      break;
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace gpdrift::exp
