#pragma once

#include <algorithm>
#include <cmath>
#include <charconv>
#include <string>
#include <type_traits>
#include <variant>

#include "gpdrift/error.hpp"

namespace gpdrift::kernels {

/// Standard Wiener process, cov(s,t) = min(s,t).
struct Wiener {};

/// Fractional Brownian motion with Hurst index `hurst`.
struct Fbm {
  double hurst;
};

/// Sub-fractional Brownian motion, (B^H_t + B^H_{-t}) / sqrt(2).
struct SubFbm {
  double hurst;
};

/// W + sqrt(fbm_scale) * B^H with W and B^H independent.
/// `fbm_scale` = 1 is the standard mixed model; 0 collapses it to Wiener.
struct MixedBmFbm {
  double hurst;
  double fbm_scale = 1.0;
};

/// B^{H1} + sqrt(second_scale) * B^{H2}, independent, H1 < H2.
struct TwoFbm {
  double hurst1;
  double hurst2;
  double second_scale = 1.0;
};

using NoiseModel = std::variant<Wiener, Fbm, SubFbm, MixedBmFbm, TwoFbm>;

namespace detail {

template <class>
inline constexpr bool always_false = false;

inline void check_hurst(double h, const char* name) {
  if (!(h > 0.0 && h < 1.0)) {
    throw ParameterError(std::string(name) + " must lie in (0,1), got " + std::to_string(h));
  }
}

inline void check_scale(double c, const char* name) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ParameterError(std::string(name) + " must be finite and >= 0");
  }
}

inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline void validate(const NoiseModel& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Wiener>) {
        } else if constexpr (std::is_same_v<M, Fbm> || std::is_same_v<M, SubFbm>) {
          detail::check_hurst(m.hurst, "H");
        } else if constexpr (std::is_same_v<M, MixedBmFbm>) {
          detail::check_hurst(m.hurst, "H");
          detail::check_scale(m.fbm_scale, "fbm_scale");
        } else if constexpr (std::is_same_v<M, TwoFbm>) {
          detail::check_hurst(m.hurst1, "H1");
          detail::check_hurst(m.hurst2, "H2");
          if (!(m.hurst1 < m.hurst2)) throw ParameterError("two-fBm model requires H1 < H2");
          detail::check_scale(m.second_scale, "second_scale");
        } else {
          static_assert(detail::always_false<M>);
        }
      },
      model);
}

/// Short stable identifier, e.g. "fbm(H=0.75)". Never contains commas.
inline std::string describe(const NoiseModel& model) {
  using detail::shortest;
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Wiener>) {
          return "wiener";
        } else if constexpr (std::is_same_v<M, Fbm>) {
          return "fbm(H=" + shortest(m.hurst) + ")";
        } else if constexpr (std::is_same_v<M, SubFbm>) {
          return "sub_fbm(H=" + shortest(m.hurst) + ")";
        } else if constexpr (std::is_same_v<M, MixedBmFbm>) {
          std::string s = "mixed(H=" + shortest(m.hurst);
          if (m.fbm_scale != 1.0) s += ";scale=" + shortest(m.fbm_scale);
          return s + ")";
        } else {
          std::string s = "two_fbm(H1=" + shortest(m.hurst1) + ";H2=" + shortest(m.hurst2);
          if (m.second_scale != 1.0) s += ";scale=" + shortest(m.second_scale);
          return s + ")";
        }
      },
      model);
}

/// E[B^H_s B^H_t] for s, t >= 0.
inline double fbm_cov(double hurst, double s, double t) {
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

/// H(2H-1)|t-s|^{2H-2}, the mixed derivative of the fBm covariance for H > 1/2.
inline double fbm_density(double hurst, double s, double t) {
  return hurst * (2.0 * hurst - 1.0) * std::pow(std::abs(t - s), 2.0 * hurst - 2.0);
}

/// E[B_s B_t] for the noise model.
inline double cov(const NoiseModel& model, double s, double t) {
  validate(model);
  if (!(s >= 0.0) || !(t >= 0.0)) throw ParameterError("cov requires s, t >= 0");
  return std::visit(
      [s, t](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Wiener>) {
          return std::min(s, t);
        } else if constexpr (std::is_same_v<M, Fbm>) {
          return fbm_cov(m.hurst, s, t);
        } else if constexpr (std::is_same_v<M, SubFbm>) {
          const double e = 2.0 * m.hurst;
          return 0.5 * (2.0 * std::pow(t, e) + 2.0 * std::pow(s, e) - std::pow(std::abs(t - s), e) -
                        std::pow(t + s, e));
        } else if constexpr (std::is_same_v<M, MixedBmFbm>) {
          return std::min(s, t) + m.fbm_scale * fbm_cov(m.hurst, s, t);
        } else {
          return fbm_cov(m.hurst1, s, t) + m.second_scale * fbm_cov(m.hurst2, s, t);
        }
      },
      model);
}

inline double variance(const NoiseModel& model, double t) { return cov(model, t, t); }

/// K(s,t) = d^2 cov / ds dt for the fractional parts of the model.
/// The Wiener component (and the identity part of the mixed model) has no density.
inline double kernel_density(const NoiseModel& model, double s, double t) {
  validate(model);
  if (s == t) throw SingularityError("kernel density is singular at s = t");
  if (!(s > 0.0) || !(t > 0.0)) throw ParameterError("kernel density requires s, t > 0");
  auto need_long_memory = [](double h) {
    if (!(h > 0.5)) {
      throw UnsupportedParameterError("kernel density requires H > 1/2, got " + std::to_string(h));
    }
  };
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Wiener>) {
          throw UnsupportedParameterError("Wiener covariance has no kernel density");
        } else if constexpr (std::is_same_v<M, Fbm>) {
          need_long_memory(m.hurst);
          return fbm_density(m.hurst, s, t);
        } else if constexpr (std::is_same_v<M, SubFbm>) {
          need_long_memory(m.hurst);
          const double h = m.hurst;
          return h * (2.0 * h - 1.0) *
                 (std::pow(std::abs(t - s), 2.0 * h - 2.0) - std::pow(t + s, 2.0 * h - 2.0));
        } else if constexpr (std::is_same_v<M, MixedBmFbm>) {
          need_long_memory(m.hurst);
          return m.fbm_scale * fbm_density(m.hurst, s, t);
        } else {
          need_long_memory(m.hurst1);
          need_long_memory(m.hurst2);
          return fbm_density(m.hurst1, s, t) + m.second_scale * fbm_density(m.hurst2, s, t);
        }
      },
      model);
}

}  // namespace gpdrift::kernels
