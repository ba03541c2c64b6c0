#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/normal_dist.hpp"

namespace robust_t {

/// A collection of finite observations in input order.
class Sample {
 public:
  Sample() = default;

  explicit Sample(std::vector<double> values) : values_(std::move(values)) { validate(); }

  Sample(std::initializer_list<double> values) : values_(values) { validate(); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  /// a*x + b elementwise.
  Sample affine(double a, double b) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [a, b](double x) { return a * x + b; });
    return Sample(std::move(out));
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DomainError("Sample: observation " + std::to_string(i) + " is not finite");
      }
    }
  }

  std::vector<double> values_;
};

namespace detail {

inline void require_nonempty(std::size_t n, const char* fn) {
  if (n == 0) throw DomainError(std::string(fn) + ": empty sample");
}

}  // namespace detail

/// Median of a scratch buffer, reordering it. Even sizes average the two
/// central order statistics.
inline double median_inplace(std::span<double> buf) {
  detail::require_nonempty(buf.size(), "median");
  const std::size_t n = buf.size();
  const std::size_t mid = n / 2;
  std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
  const double upper = buf[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(buf.begin(), buf.begin() + mid);
  return (lower + upper) / 2.0;
}

/// Median and MAD of a scratch buffer; the buffer is overwritten with the
/// absolute deviations.
struct MedianMad {
  double median;
  double mad;
};

inline MedianMad median_mad_inplace(std::span<double> buf) {
  const double med = median_inplace(buf);
  for (double& x : buf) x = std::fabs(x - med);
  return {med, median_inplace(buf)};
}

inline double median(std::span<const double> values) {
  std::vector<double> buf(values.begin(), values.end());
  return median_inplace(buf);
}

inline double median(const Sample& sample) { return median(sample.values()); }

inline double mad(std::span<const double> values) {
  std::vector<double> buf(values.begin(), values.end());
  return median_mad_inplace(buf).mad;
}

inline double mad(const Sample& sample) { return mad(sample.values()); }

/// MAD divided by Phi^-1(3/4); consistent for sigma under normal data.
inline double rescaled_mad(const Sample& sample) {
  return mad(sample) / mad_consistency_constant();
}

inline double rescaled_mad(std::span<const double> values) {
  return mad(values) / mad_consistency_constant();
}

}  // namespace robust_t
