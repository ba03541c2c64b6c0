#pragma once

// One-sample location tests and confidence intervals.
//
// Asymptotic calibration refers the scaled median/MAD statistic to N(0, 1).
// Monte Carlo calibration uses a QuantileTable: the simulated distribution of
// the pivot (median - mu) / MAD under standard normal data. Because the pivot's
// distribution does not depend on the location or scale of normal data, one
// table per sample size serves every (mu, sigma).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/montecarlo.hpp"
#include "robust_t/normal_dist.hpp"
#include "robust_t/robust_estimators.hpp"
#include "robust_t/sampling.hpp"
#include "robust_t/statistics.hpp"

namespace robust_t {

// ---------------------------------------------------------------------------
// Student t distribution

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz method.
inline double incomplete_beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::incomplete_beta_cf(a, b, x) / a;
  }
  return 1.0 - front * detail::incomplete_beta_cf(b, a, 1.0 - x) / b;
}

/// P(T > |t|) for Student t with `df` degrees of freedom.
inline double student_t_upper_tail_abs(double t, double df) {
  const double x = df / (df + t * t);
  return 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
}

inline double student_t_cdf(double t, double df) {
  if (!std::isfinite(t)) throw DomainError("student_t_cdf: t must be finite");
  if (!(df > 0.0)) throw DomainError("student_t_cdf: df must be positive");
  const double tail = student_t_upper_tail_abs(t, df);
  return t < 0.0 ? tail : 1.0 - tail;
}

/// Quantile of Student t by bisection on the CDF.
inline double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p must lie in (0, 1)");
  if (!(df > 0.0)) throw DomainError("student_t_quantile: df must be positive");
  if (p == 0.5) return 0.0;
  double lo = -1.0;
  double hi = 1.0;
  while (student_t_cdf(lo, df) > p) lo *= 2.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Results

enum class Alternative { two_sided, greater, less };

inline std::string_view to_string(Alternative alt) {
  switch (alt) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "unknown";
}

enum class Calibration { asymptotic, monte_carlo, student_t };

inline std::string_view to_string(Calibration c) {
  switch (c) {
    case Calibration::asymptotic: return "asymptotic";
    case Calibration::monte_carlo: return "monte_carlo";
    case Calibration::student_t: return "student_t";
  }
  return "unknown";
}

struct Decision {
  double level;
  bool reject;
};

struct TestResult {
  // T_m for robust tests, the Student statistic for the classical test.
  double statistic_raw = 0.0;
  // sqrt(2/pi) * Phi^-1(3/4) * T_m; equals statistic_raw for the classical test.
  double statistic_scaled = 0.0;
  double p_value = 1.0;
  Alternative alternative = Alternative::two_sided;
  Calibration calibration = Calibration::asymptotic;
  // Identifies the table for monte_carlo calibration.
  std::optional<std::string> table_id;
  std::size_t n = 0;
  double mu0 = 0.0;
  std::optional<Decision> reject_at;
};

inline void decide(TestResult& result, std::optional<double> level) {
  if (!level) return;
  if (!(*level > 0.0 && *level < 1.0)) throw DomainError("significance level must lie in (0, 1)");
  result.reject_at = Decision{*level, result.p_value <= *level};
}

// ---------------------------------------------------------------------------
// Quantile tables

inline const std::vector<double>& default_table_probs() {
  static const std::vector<double> probs = {0.005, 0.01, 0.025, 0.05, 0.1,   0.25, 0.5,
                                            0.75,  0.9,  0.95,  0.975, 0.99, 0.995};
  return probs;
}

// Minimum replications for a table whose results are reported.
inline constexpr std::size_t kReportableTableReps = 100000;
inline constexpr std::size_t kMinTableReps = 1000;

struct QuantileTable {
  std::size_t n = 0;
  std::vector<double> probs;
  std::vector<double> quantiles;
  std::size_t reps = 0;
  RngSpec rng{};
  std::string created_at;

  /// Stable identifier derived from the simulation inputs.
  std::string id() const {
    return "n" + std::to_string(n) + "-r" + std::to_string(reps) + "-s" +
           std::to_string(rng.seed) + "-t" + std::to_string(rng.stream);
  }

  /// Throws CorruptTableError unless the table's invariants hold.
  void validate() const {
    if (n < 2) throw CorruptTableError("quantile table: n must be at least 2");
    if (probs.empty() || probs.size() != quantiles.size()) {
      throw CorruptTableError("quantile table: probs and quantiles must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!(probs[i] > 0.0 && probs[i] < 1.0)) {
        throw CorruptTableError("quantile table: probabilities must lie in (0, 1)");
      }
      if (!std::isfinite(quantiles[i])) throw CorruptTableError("quantile table: non-finite quantile");
      if (i > 0 && !(probs[i] > probs[i - 1])) {
        throw CorruptTableError("quantile table: probabilities must be strictly increasing");
      }
      if (i > 0 && quantiles[i] < quantiles[i - 1]) {
        throw CorruptTableError("quantile table: quantiles must be nondecreasing");
      }
    }
    if (reps < 2) throw CorruptTableError("quantile table: reps must be at least 2");
  }

  /// Quantile at p, interpolating linearly in p between stored grid points.
  /// p outside the grid is an error rather than an extrapolation.
  double quantile(double p) const {
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (std::fabs(probs[i] - p) <= 1e-12) return quantiles[i];
    }
    const auto it = std::lower_bound(probs.begin(), probs.end(), p);
    if (it == probs.begin() || it == probs.end()) {
      throw DomainError("quantile table: probability " + std::to_string(p) +
                        " is outside the stored grid");
    }
    const std::size_t hi = static_cast<std::size_t>(it - probs.begin());
    const std::size_t lo = hi - 1;
    const double w = (p - probs[lo]) / (probs[hi] - probs[lo]);
    return quantiles[lo] + w * (quantiles[hi] - quantiles[lo]);
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline SimulationConfig table_simulation_config(std::size_t n, std::size_t reps, const RngSpec& rng,
                                                unsigned threads) {
  SimulationConfig cfg;
  cfg.n = n;
  cfg.reps = reps;
  cfg.rng = rng;
  cfg.statistic_kind = StatisticKind::pivot;
  cfg.data_model = StdNormalModel{};
  cfg.mu0 = 0.0;
  cfg.threads = threads;
  return cfg;
}

/// Simulated quantiles of the pivot at sample size n under standard normal data.
inline QuantileTable build_quantile_table(std::size_t n, const std::vector<double>& probs,
                                          std::size_t reps, const RngSpec& rng,
                                          unsigned threads = 1) {
  if (n < 2) throw InsufficientDataError("build_quantile_table: n must be at least 2");
  if (reps < kMinTableReps) {
    throw DomainError("build_quantile_table: reps must be at least " + std::to_string(kMinTableReps));
  }
  if (probs.empty()) throw DomainError("build_quantile_table: empty probability list");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] < 1.0) || (i > 0 && !(probs[i] > probs[i - 1]))) {
      throw DomainError("build_quantile_table: probabilities must be strictly increasing in (0, 1)");
    }
  }
  const auto dist = simulate_statistic(table_simulation_config(n, reps, rng, threads));
  QuantileTable table;
  table.n = n;
  table.probs = probs;
  table.reps = reps;
  table.rng = rng;
  table.created_at = utc_timestamp();
  table.quantiles.reserve(probs.size());
  for (double p : probs) table.quantiles.push_back(empirical_quantile(dist, p));
  return table;
}

/// Regenerates the simulated pivot distribution a table was built from and
/// checks that it reproduces the stored quantiles.
inline EmpiricalDistribution table_source_distribution(const QuantileTable& table,
                                                       unsigned threads = 1) {
  table.validate();
  auto dist = simulate_statistic(table_simulation_config(table.n, table.reps, table.rng, threads));
  for (std::size_t i = 0; i < table.probs.size(); ++i) {
    const double q = empirical_quantile(dist, table.probs[i]);
    if (std::fabs(q - table.quantiles[i]) > 1e-12 * std::max(1.0, std::fabs(q))) {
      throw IncompatibleTableError(
          "quantile table " + table.id() +
          " cannot be reproduced by this build; rebuild it with the calibrate command");
    }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Tests

/// Monte Carlo p-value of an observed pivot against simulated pivots,
/// (1 + #{at least as extreme}) / (reps + 1).
inline double monte_carlo_p_value(const EmpiricalDistribution& source, double observed,
                                  Alternative alt) {
  const auto& v = source.sorted_values;
  if (v.empty()) throw DomainError("monte_carlo_p_value: empty source distribution");
  std::size_t extreme = 0;
  switch (alt) {
    case Alternative::greater:
      extreme = static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), observed));
      break;
    case Alternative::less:
      extreme = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), observed) - v.begin());
      break;
    case Alternative::two_sided: {
      const double a = std::fabs(observed);
      extreme = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), -a) - v.begin()) +
                static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), a));
      if (a == 0.0) extreme = v.size();
      break;
    }
  }
  return (1.0 + static_cast<double>(extreme)) / (static_cast<double>(v.size()) + 1.0);
}

inline double asymptotic_p_value(double scaled, Alternative alt) {
  switch (alt) {
    case Alternative::two_sided: return std::min(1.0, 2.0 * std_normal_cdf(-std::fabs(scaled)));
    case Alternative::greater: return std_normal_cdf(-scaled);
    case Alternative::less: return std_normal_cdf(scaled);
  }
  return 1.0;
}

namespace detail {

inline TestResult robust_statistics(const Sample& sample, double mu0, Alternative alt) {
  if (!std::isfinite(mu0)) throw DomainError("mu0 must be finite");
  TestResult result;
  const double pivot = pivot_statistic(sample, mu0);
  result.statistic_raw = std::sqrt(static_cast<double>(sample.size())) * pivot;
  result.statistic_scaled = robust_t_scale_factor() * result.statistic_raw;
  result.alternative = alt;
  result.n = sample.size();
  result.mu0 = mu0;
  return result;
}

}  // namespace detail

/// Median/MAD test of H0: mu = mu0 referred to N(0, 1) through the scaled
/// statistic.
inline TestResult robust_one_sample_test(const Sample& sample, double mu0, Alternative alt,
                                         std::optional<double> level = std::nullopt) {
  TestResult result = detail::robust_statistics(sample, mu0, alt);
  result.calibration = Calibration::asymptotic;
  result.p_value = asymptotic_p_value(result.statistic_scaled, alt);
  decide(result, level);
  return result;
}

/// Median/MAD test calibrated against a simulated pivot distribution.
inline TestResult robust_one_sample_test(const Sample& sample, double mu0, Alternative alt,
                                         const EmpiricalDistribution& source,
                                         std::optional<double> level = std::nullopt,
                                         std::optional<std::string> table_id = std::nullopt) {
  if (source.config.n != sample.size()) {
    throw DomainError("calibration distribution was simulated for n = " +
                      std::to_string(source.config.n) + " but the sample has n = " +
                      std::to_string(sample.size()));
  }
  TestResult result = detail::robust_statistics(sample, mu0, alt);
  result.calibration = Calibration::monte_carlo;
  result.table_id = std::move(table_id);
  const double pivot = result.statistic_raw / std::sqrt(static_cast<double>(sample.size()));
  result.p_value = monte_carlo_p_value(source, pivot, alt);
  decide(result, level);
  return result;
}

inline TestResult robust_one_sample_test(const Sample& sample, double mu0, Alternative alt,
                                         Calibration calibration, const QuantileTable* table,
                                         std::optional<double> level = std::nullopt,
                                         unsigned threads = 1) {
  switch (calibration) {
    case Calibration::asymptotic: return robust_one_sample_test(sample, mu0, alt, level);
    case Calibration::monte_carlo: {
      if (table == nullptr) throw DomainError("monte carlo calibration requires a quantile table");
      if (table->n != sample.size()) {
        throw DomainError("quantile table is for n = " + std::to_string(table->n) +
                          " but the sample has n = " + std::to_string(sample.size()));
      }
      // Statistic errors take precedence over the replay cost.
      detail::robust_statistics(sample, mu0, alt);
      const auto source = table_source_distribution(*table, threads);
      return robust_one_sample_test(sample, mu0, alt, source, level, table->id());
    }
    case Calibration::student_t: break;
  }
  throw DomainError("robust test supports asymptotic or monte_carlo calibration");
}

struct Interval {
  double lower;
  double upper;

  bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Inverts the pivot: [median - q(1 - a/2) * MAD, median - q(a/2) * MAD].
inline Interval robust_confidence_interval(const Sample& sample, double level,
                                           const QuantileTable& table) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  if (table.n != sample.size()) {
    throw DomainError("quantile table is for n = " + std::to_string(table.n) +
                      " but the sample has n = " + std::to_string(sample.size()));
  }
  detail::require_testable(sample.size());
  std::vector<double> buf(sample.begin(), sample.end());
  const auto [med, scale] = median_mad_inplace(buf);
  if (!(scale > 0.0)) throw DegenerateSampleError("MAD is zero; interval is undefined");
  const double alpha = 1.0 - level;
  const double q_lo = table.quantile(alpha / 2.0);
  const double q_hi = table.quantile(1.0 - alpha / 2.0);
  return {med - q_hi * scale, med - q_lo * scale};
}

/// Student t test with n - 1 degrees of freedom.
inline TestResult classical_one_sample_test(const Sample& sample, double mu0, Alternative alt,
                                            std::optional<double> level = std::nullopt) {
  if (!std::isfinite(mu0)) throw DomainError("mu0 must be finite");
  TestResult result;
  const double t = classical_t(sample, mu0);
  const double df = static_cast<double>(sample.size() - 1);
  const double tail = student_t_upper_tail_abs(t, df);
  result.statistic_raw = t;
  result.statistic_scaled = t;
  result.alternative = alt;
  result.calibration = Calibration::student_t;
  result.n = sample.size();
  result.mu0 = mu0;
  switch (alt) {
    case Alternative::two_sided: result.p_value = std::min(1.0, 2.0 * tail); break;
    case Alternative::greater: result.p_value = t >= 0.0 ? tail : 1.0 - tail; break;
    case Alternative::less: result.p_value = t < 0.0 ? tail : 1.0 - tail; break;
  }
  decide(result, level);
  return result;
}

}  // namespace robust_t
