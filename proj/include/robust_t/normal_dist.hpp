#pragma once

// Standard normal density, distribution and quantile functions.
//
// The CDF is evaluated through std::erfc, which keeps full relative accuracy
// in the lower tail; absolute error is below 1e-15 on [-8, 8]. Outside that
// range the CDF is reported as exactly 0 or 1, so no tail probability below
// Phi(-8) ~ 6.2e-16 is distinguished.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "robust_t/errors.hpp"

namespace robust_t {

inline constexpr double kCdfClampBound = 8.0;

namespace detail {

inline void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be finite");
  }
}

// Acklam's rational approximation to the normal quantile, relative error
// about 1.15e-9 before refinement.
inline double quantile_initial_guess(double p) {
  constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                       -2.759285104469687e+02, 1.383577518672690e+02,
                                       -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                       -1.556989798598866e+02, 6.680131188771972e+01,
                                       -1.328068155288572e+01};
  constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                       -2.400758277161838e+00, -2.549732539343734e+00,
                                       4.374664141464968e+00,  2.938163982698783e+00};
  constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                       2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  auto tail = [&](double q) {
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  };
  if (p < p_low) {
    return tail(std::sqrt(-2.0 * std::log(p)));
  }
  if (p > 1.0 - p_low) {
    return -tail(std::sqrt(-2.0 * std::log1p(-p)));
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

inline double std_normal_pdf(double x) {
  detail::require_finite(x, "std_normal_pdf");
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

inline double std_normal_cdf(double x) {
  detail::require_finite(x, "std_normal_cdf");
  if (x < -kCdfClampBound) return 0.0;
  if (x > kCdfClampBound) return 1.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse of std_normal_cdf on (0, 1).
///
/// A rational initial approximation is refined with Halley steps against
/// std_normal_cdf. The refinement works on whichever tail is smaller so that
/// p close to 1 does not lose precision.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: probability must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double tail_p = upper ? 1.0 - p : p;
  double x = detail::quantile_initial_guess(tail_p);  // negative
  if (x > -kCdfClampBound) {
    for (int iter = 0; iter < 2; ++iter) {
      const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - tail_p;
      const double u = err / std_normal_pdf(x);
      x -= u / (1.0 + 0.5 * x * u);
    }
  }
  return upper ? -x : x;
}

struct NormalConstants {
  double mad_consistency;  // Phi^-1(3/4)
  double median_avar;      // pi/2
  double density_at_zero;  // 1/sqrt(2 pi)
};

inline NormalConstants normal_constants() {
  const double f0 = std_normal_pdf(0.0);
  return NormalConstants{std_normal_quantile(0.75), 1.0 / (4.0 * f0 * f0), f0};
}

inline double mad_consistency_constant() {
  static const double value = std_normal_quantile(0.75);
  return value;
}

/// sqrt(2n/pi) * Phi^-1(3/4): multiplies the median/MAD pivot to give a
/// statistic that is asymptotically N(0, 1) under normal data.
inline double scaling_constant(std::size_t n) {
  if (n == 0) throw DomainError("scaling_constant: n must be positive");
  return std::sqrt(2.0 * static_cast<double>(n) / std::numbers::pi) * mad_consistency_constant();
}

}  // namespace robust_t
