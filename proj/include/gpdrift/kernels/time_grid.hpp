#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gpdrift/error.hpp"

namespace gpdrift::kernels {

/// Observation times 0 < t_1 < ... < t_N. t_0 = 0 is implicit.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ParameterError("time grid must be nonempty");
    double prev = 0.0;
    for (double t : nodes_) {
      if (!std::isfinite(t)) throw ParameterError("time grid nodes must be finite");
      if (!(t > prev)) throw ParameterError("time grid must be strictly increasing with t_1 > 0");
      prev = t;
    }
  }

  /// Nodes T*k/n, k = 1..n.
  static TimeGrid uniform(double horizon, std::size_t n) {
    if (n == 0 || !(horizon > 0.0)) throw ParameterError("uniform grid needs n >= 1 and T > 0");
    std::vector<double> nodes(n);
    for (std::size_t k = 1; k <= n; ++k) {
      nodes[k - 1] = horizon * static_cast<double>(k) / static_cast<double>(n);
    }
    nodes.back() = horizon;
    return TimeGrid(std::move(nodes));
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  /// t_i with t_0 = 0 for i = 0, i.e. index shifted by one.
  double node_or_zero(std::size_t i) const { return i == 0 ? 0.0 : nodes_[i - 1]; }
  double horizon() const noexcept { return nodes_.back(); }
  std::span<const double> nodes() const noexcept { return nodes_; }

  bool is_uniform(double rel_tol = 1e-12) const {
    const double step = horizon() / static_cast<double>(size());
    for (std::size_t k = 0; k < size(); ++k) {
      const double expected = step * static_cast<double>(k + 1);
      if (std::abs(nodes_[k] - expected) > rel_tol * horizon()) return false;
    }
    return true;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::vector<double> nodes_;
};

}  // namespace gpdrift::kernels
