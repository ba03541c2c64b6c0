#pragma once

// Location test statistics built on the median and MAD, plus the classical
// Student statistic for comparison.
//
//   pivot            (median - mu) / MAD
//   robust_t         sqrt(n) * pivot
//   scaled_robust_t  sqrt(2n/pi) * Phi^-1(3/4) * pivot
//                  = sqrt(2/pi) * Phi^-1(3/4) * robust_t
//
// scaled_robust_t converges to N(0, 1) under normal data. Multiplying robust_t
// by sqrt(2n/pi) * Phi^-1(3/4) instead carries an extra sqrt(n) and diverges;
// overscaled_robust_t exists only so that simulations can demonstrate this.

#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/normal_dist.hpp"
#include "robust_t/robust_estimators.hpp"

namespace robust_t {

enum class StatisticKind { pivot, robust_t, scaled_robust_t, classical_t };

inline std::string_view to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::pivot: return "pivot";
    case StatisticKind::robust_t: return "robust_t";
    case StatisticKind::scaled_robust_t: return "scaled_robust_t";
    case StatisticKind::classical_t: return "classical_t";
  }
  return "unknown";
}

struct StatisticValue {
  double raw;
  StatisticKind kind;
  std::size_t n;
  double mu0;
};

/// Ratio scaled_robust_t / robust_t, independent of n.
inline double robust_t_scale_factor() {
  return std::sqrt(2.0 / std::numbers::pi) * mad_consistency_constant();
}

namespace detail {

inline void require_testable(std::size_t n) {
  if (n < 2) throw InsufficientDataError("test statistic requires at least 2 observations");
}

inline double pivot_from(MedianMad mm, double mu) {
  if (!(mm.mad > 0.0)) {
    throw DegenerateSampleError("MAD is zero; the median/MAD statistic is undefined");
  }
  return (mm.median - mu) / mm.mad;
}

struct MeanSd {
  double mean;
  double sd;
};

// Two-pass mean and n-1 standard deviation.
inline MeanSd mean_sd(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace detail

/// Pivot from a scratch buffer that may be reordered. Used by the simulation
/// loop to avoid a copy per replication.
inline double pivot_statistic_inplace(std::span<double> buf, double mu) {
  detail::require_testable(buf.size());
  return detail::pivot_from(median_mad_inplace(buf), mu);
}

inline double pivot_statistic(std::span<const double> values, double mu) {
  std::vector<double> buf(values.begin(), values.end());
  return pivot_statistic_inplace(buf, mu);
}

inline double pivot_statistic(const Sample& sample, double mu) {
  return pivot_statistic(sample.values(), mu);
}

inline double robust_t(const Sample& sample, double mu) {
  return std::sqrt(static_cast<double>(sample.size())) * pivot_statistic(sample, mu);
}

inline double scaled_robust_t(const Sample& sample, double mu) {
  const double pivot = pivot_statistic(sample, mu);
  return scaling_constant(sample.size()) * pivot;
}

/// scaling_constant(n) * robust_t: the sqrt(n)-too-large normalization.
inline double overscaled_robust_t(const Sample& sample, double mu) {
  const double t = robust_t(sample, mu);
  return scaling_constant(sample.size()) * t;
}

inline double classical_t(std::span<const double> values, double mu) {
  detail::require_testable(values.size());
  const auto [mean, sd] = detail::mean_sd(values);
  if (!(sd > 0.0)) {
    throw DegenerateSampleError("sample standard deviation is zero; Student t is undefined");
  }
  return (mean - mu) / (sd / std::sqrt(static_cast<double>(values.size())));
}

inline double classical_t(const Sample& sample, double mu) {
  return classical_t(sample.values(), mu);
}

inline StatisticValue compute_statistic(StatisticKind kind, const Sample& sample, double mu0) {
  double raw = 0.0;
  switch (kind) {
    case StatisticKind::pivot: raw = pivot_statistic(sample, mu0); break;
    case StatisticKind::robust_t: raw = robust_t(sample, mu0); break;
    case StatisticKind::scaled_robust_t: raw = scaled_robust_t(sample, mu0); break;
    case StatisticKind::classical_t: raw = classical_t(sample, mu0); break;
  }
  return {raw, kind, sample.size(), mu0};
}

}  // namespace robust_t
