#pragma once

// Reference computations used only by tests. They avoid the library's code
// paths: densities are written out directly, CDFs come from quadrature, and
// order statistics from a full sort.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-15) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50);
}

/// Phi(x) as 1/2 plus the integral of the density over [0, x].
inline double normal_cdf_by_quadrature(double x) {
  return 0.5 + integrate(normal_density, 0.0, x);
}

/// Root of a nondecreasing f on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)>& f, double target, double lo, double hi,
                     double tol = 1e-14) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double student_t_density(double t, double df) {
  const double log_c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                       0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_c - (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

/// P(T <= t) by quadrature of the t density over [0, t].
inline double student_t_cdf_by_quadrature(double t, double df) {
  return 0.5 + integrate([df](double s) { return student_t_density(s, df); }, 0.0, t, 1e-14);
}

inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double sorted_mad(const std::vector<double>& v) {
  const double med = sorted_median(v);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::fabs(x - med));
  return sorted_median(dev);
}

}  // namespace oracle
