#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gpdrift/error.hpp"
#include "gpdrift/kernels/noise_model.hpp"
#include "gpdrift/kernels/time_grid.hpp"

namespace gpdrift::sim {

/// G(t) = t, g(t) = 1.
struct LinearDrift {};

/// G(t) = t^{alpha+1}, g(t) = (alpha+1) t^alpha, alpha > -1.
struct PowerDrift {
  double alpha;
};

/// g tabulated on nodes 0 = s_0 < s_1 < ... < s_m; between nodes g is linear and
/// G is its exact integral, so G at the nodes is the cumulative trapezoid sum.
class TabulatedDrift {
 public:
  TabulatedDrift(std::vector<double> nodes, std::vector<double> g)
      : nodes_(std::move(nodes)), g_(std::move(g)) {
    if (nodes_.size() < 2 || nodes_.size() != g_.size()) {
      throw ParameterError("tabulated drift needs >= 2 nodes and matching g values");
    }
    if (nodes_.front() != 0.0) throw ParameterError("tabulated drift must start at s_0 = 0");
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      if (!(nodes_[k] > nodes_[k - 1])) throw ParameterError("tabulated nodes must increase");
    }
    cumulative_.assign(nodes_.size(), 0.0);
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      cumulative_[k] = cumulative_[k - 1] + 0.5 * (g_[k] + g_[k - 1]) * (nodes_[k] - nodes_[k - 1]);
    }
  }

  double g(double t) const {
    const std::size_t k = segment(t);
    const double w = (t - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
    return (1.0 - w) * g_[k] + w * g_[k + 1];
  }

  double G(double t) const {
    const std::size_t k = segment(t);
    return cumulative_[k] + 0.5 * (t - nodes_[k]) * (g_[k] + g(t));
  }

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return g_; }

 private:
  std::size_t segment(double t) const {
    if (!(t >= 0.0) || t > nodes_.back()) {
      throw ParameterError("tabulated drift queried outside [0, " + std::to_string(nodes_.back()) + "]");
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    auto k = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
    return std::min(k == 0 ? 0 : k - 1, nodes_.size() - 2);
  }

  std::vector<double> nodes_;
  std::vector<double> g_;
  std::vector<double> cumulative_;
};

using DriftSpec = std::variant<LinearDrift, PowerDrift, TabulatedDrift>;

inline void validate(const DriftSpec& drift) {
  if (const auto* p = std::get_if<PowerDrift>(&drift)) {
    if (!(p->alpha > -1.0) || !std::isfinite(p->alpha)) {
      throw ParameterError("power drift requires alpha > -1");
    }
  }
}

inline double drift_G(const DriftSpec& drift, double t) {
  validate(drift);
  return std::visit(
      [t](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, LinearDrift>) {
          return t;
        } else if constexpr (std::is_same_v<D, PowerDrift>) {
          return t == 0.0 ? 0.0 : std::pow(t, d.alpha + 1.0);
        } else {
          return d.G(t);
        }
      },
      drift);
}

inline double drift_g(const DriftSpec& drift, double t) {
  validate(drift);
  return std::visit(
      [t](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, LinearDrift>) {
          return 1.0;
        } else if constexpr (std::is_same_v<D, PowerDrift>) {
          return (d.alpha + 1.0) * std::pow(t, d.alpha);
        } else {
          return d.g(t);
        }
      },
      drift);
}

/// Exponent of the leading power of g at 0 (alpha for power drift, else 0).
inline double drift_g_exponent(const DriftSpec& drift) {
  if (const auto* p = std::get_if<PowerDrift>(&drift)) return p->alpha;
  return 0.0;
}

inline std::string describe(const DriftSpec& drift) {
  return std::visit(
      [](const auto& d) -> std::string {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, LinearDrift>) {
          return "linear";
        } else if constexpr (std::is_same_v<D, PowerDrift>) {
          return "power(alpha=" + kernels::detail::shortest(d.alpha) + ")";
        } else {
          return "tabulated(m=" + std::to_string(d.nodes().size()) + ")";
        }
      },
      drift);
}

/// (G(t_1), G(t_2)-G(t_1), ..., G(t_N)-G(t_{N-1})).
inline Eigen::VectorXd drift_increments(const DriftSpec& drift, const kernels::TimeGrid& grid) {
  Eigen::VectorXd dg(static_cast<Eigen::Index>(grid.size()));
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double cur = drift_G(drift, grid[i]);
    dg(static_cast<Eigen::Index>(i)) = cur - prev;
    prev = cur;
  }
  return dg;
}

}  // namespace gpdrift::sim
