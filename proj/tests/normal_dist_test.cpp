#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "robust_t/normal_dist.hpp"

namespace robust_t {
namespace {

// 40-digit evaluations (mpmath), frozen.
constexpr double kPdfAt2 = 0.05399096651318805195;
constexpr double kQuantile075 = 0.67448975019608174320;
constexpr double kQuantile0975 = 1.95996398454005423552;
constexpr double kScalingAtOne = 0.53816495810123504873;

TEST(NormalPdf, ClosedFormAtZero) {
  EXPECT_DOUBLE_EQ(std_normal_pdf(0.0), 0.3989422804014327);
}

TEST(NormalPdf, Symmetric) {
  EXPECT_EQ(std_normal_pdf(1.0), std_normal_pdf(-1.0));
  EXPECT_EQ(std_normal_pdf(3.7), std_normal_pdf(-3.7));
}

TEST(NormalPdf, MatchesHighPrecisionAtTwo) {
  EXPECT_NEAR(std_normal_pdf(2.0), kPdfAt2, 1e-14);
}

TEST(NormalPdf, RejectsNonFinite) {
  EXPECT_THROW(std_normal_pdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(std_normal_pdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(NormalCdf, HalfAtZero) { EXPECT_EQ(std_normal_cdf(0.0), 0.5); }

TEST(NormalCdf, SymmetryIdentity) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 4.0, 7.5}) {
    EXPECT_NEAR(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-14) << x;
  }
}

TEST(NormalCdf, AgreesWithQuadratureOracle) {
  EXPECT_NEAR(std_normal_cdf(0.6744897501960817), 0.75, 1e-10);
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    EXPECT_NEAR(std_normal_cdf(x), oracle::normal_cdf_by_quadrature(x), 1e-12) << x;
  }
}

TEST(NormalCdf, ClampsOutsideReportedRange) {
  EXPECT_EQ(std_normal_cdf(-8.5), 0.0);
  EXPECT_EQ(std_normal_cdf(9.0), 1.0);
  EXPECT_GT(std_normal_cdf(-8.0), 0.0);
}

TEST(NormalCdf, RejectsNonFinite) {
  EXPECT_THROW(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(NormalCdf, MonotoneOnFineGrid) {
  double prev = std_normal_cdf(-8.0);
  for (int i = 1; i <= 10000; ++i) {
    const double x = -8.0 + 16.0 * i / 10000.0;
    const double v = std_normal_cdf(x);
    ASSERT_GE(v, prev) << x;
    prev = v;
  }
}

TEST(NormalCdf, CentralDifferenceMatchesDensity) {
  const double h = 1e-5;
  for (int i = 0; i <= 1600; ++i) {
    const double x = -8.0 + 0.01 * i;
    const double slope = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
    ASSERT_NEAR(slope, std_normal_pdf(x), 1e-6) << x;
  }
}

TEST(NormalQuantile, Median) { EXPECT_EQ(std_normal_quantile(0.5), 0.0); }

TEST(NormalQuantile, MatchesBisectionOracle) {
  auto cdf = [](double x) { return std_normal_cdf(x); };
  const double q75 = oracle::bisect(cdf, 0.75, -10.0, 10.0);
  const double q975 = oracle::bisect(cdf, 0.975, -10.0, 10.0);
  EXPECT_NEAR(std_normal_quantile(0.75), q75, 1e-9);
  EXPECT_NEAR(std_normal_quantile(0.975), q975, 1e-9);
  EXPECT_NEAR(std_normal_quantile(0.75), kQuantile075, 1e-14);
  EXPECT_NEAR(std_normal_quantile(0.975), kQuantile0975, 1e-14);
}

TEST(NormalQuantile, InvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(std_normal_cdf(std_normal_quantile(p)), p, 1e-10 * std::max(1.0, p)) << p;
  }
}

TEST(NormalQuantile, RoundTripThroughCdf) {
  for (double x : {-6.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0}) {
    EXPECT_LT(std::fabs(std_normal_quantile(std_normal_cdf(x)) - x), 1e-8) << x;
  }
}

TEST(NormalQuantile, RejectsOutsideUnitInterval) {
  for (double p : {0.0, 1.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
    EXPECT_THROW(std_normal_quantile(p), DomainError) << p;
  }
}

TEST(ScalingConstant, DerivedValueAtOne) {
  // sqrt(2/pi) times the bisection-derived Phi^-1(3/4).
  const double q75 = oracle::bisect([](double x) { return std_normal_cdf(x); }, 0.75, 0.0, 2.0);
  const double derived = std::sqrt(2.0 / std::numbers::pi) * q75;
  EXPECT_NEAR(scaling_constant(1), derived, 1e-9);
  EXPECT_NEAR(scaling_constant(1), kScalingAtOne, 1e-14);
}

TEST(ScalingConstant, SqrtNScaling) {
  EXPECT_NEAR(scaling_constant(4), 2.0 * scaling_constant(1), 1e-15);
  EXPECT_NEAR(scaling_constant(100), 10.0 * scaling_constant(1), 1e-12);
}

TEST(ScalingConstant, RejectsZero) { EXPECT_THROW(scaling_constant(0), DomainError); }

TEST(NormalConstants, Identities) {
  const auto c = normal_constants();
  EXPECT_NEAR(std_normal_cdf(c.mad_consistency), 0.75, 1e-12);
  EXPECT_NEAR(c.median_avar, 1.0 / (4.0 * c.density_at_zero * c.density_at_zero), 1e-12);
  EXPECT_NEAR(c.median_avar, std::numbers::pi / 2.0, 1e-12);
  EXPECT_NEAR(c.density_at_zero, 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

}  // namespace
}  // namespace robust_t
