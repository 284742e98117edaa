#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ldyn/interval_map.hpp"
#include "ldyn/lyapunov.hpp"

using namespace ldyn;

TEST(CoreMaps, LogisticFixedPointAndCriticalValue) {
  const IntervalMap f(Family::logistic, 4.0);
  EXPECT_DOUBLE_EQ(f(0.75), 0.75);
  EXPECT_DOUBLE_EQ(f(0.5), 1.0);
  EXPECT_DOUBLE_EQ(f(0.0), 0.0);
  EXPECT_DOUBLE_EQ(f.derivative(0.0), 4.0);
  EXPECT_DOUBLE_EQ(f.derivative(0.75), -2.0);
  EXPECT_EQ(f.derivative(0.5), 0.0);
  EXPECT_EQ(f.name(), "logistic:4");
}

TEST(CoreMaps, SineEndpointsAndSymmetry) {
  const IntervalMap g = make_family("sine");
  EXPECT_EQ(g(0.0), 0.0);
  EXPECT_EQ(g(1.0), 0.0);
  EXPECT_DOUBLE_EQ(g(0.5), 1.0);
  EXPECT_NEAR(g(0.3), g(0.7), 1e-15);
  EXPECT_NEAR(g.deriv_sup(), std::numbers::pi, 0.0);
  EXPECT_TRUE(std::isnan(g.param()));
  EXPECT_EQ(g.name(), "sine");
}

TEST(CoreMaps, TentIsPiecewiseLinear) {
  const IntervalMap t(Family::tent, 1.5);
  EXPECT_DOUBLE_EQ(t(0.2), 0.3);
  EXPECT_DOUBLE_EQ(t(0.8), 1.5 * 0.2);
  EXPECT_DOUBLE_EQ(std::fabs(t.derivative(0.5)), 1.5);
  EXPECT_FALSE(t.is_c3());
  EXPECT_FALSE(t.critical_points().front().order.has_value());
  EXPECT_EQ(*IntervalMap(Family::logistic, 3.0).critical_points().front().order, 2.0);
}

TEST(CoreMaps, ParameterValidation) {
  EXPECT_THROW(IntervalMap(Family::logistic, 4.5), Error);
  EXPECT_THROW(IntervalMap(Family::logistic, 0.0), Error);
  EXPECT_THROW(IntervalMap(Family::tent, 1.0), Error);
  EXPECT_THROW(IntervalMap(Family::tent, 2.1), Error);
  EXPECT_THROW(IntervalMap(Family::sine, 2.0), Error);
  EXPECT_NO_THROW(IntervalMap(Family::sine, 1.0));
  try {
    parse_map("henon:1.4");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_family);
  }
  try {
    parse_map("logistic:5");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter_out_of_range);
  }
  EXPECT_THROW(parse_map("logistic:abc"), Error);
}

TEST(CoreMaps, BranchStructure) {
  const IntervalMap f(Family::logistic, 3.5);
  ASSERT_EQ(f.branch_count(), 2u);
  EXPECT_TRUE(f.is_unimodal());
  EXPECT_EQ(f.branches()[0].orientation, Orientation::increasing);
  EXPECT_EQ(f.branches()[1].orientation, Orientation::decreasing);
  EXPECT_DOUBLE_EQ(f.branches()[0].image.hi, 3.5 / 4.0);
  EXPECT_EQ(*f.branch_of(0.3), 0u);
  EXPECT_EQ(*f.branch_of(0.7), 1u);
  EXPECT_FALSE(f.branch_of(0.5).has_value());
}

// Property: inverse branches invert the map on their image.
TEST(CoreMaps, InverseBranchesRoundTrip) {
  std::mt19937_64 rng(11);
  for (const IntervalMap& m : {IntervalMap(Family::logistic, 4.0), IntervalMap(Family::logistic, 3.3),
                               IntervalMap(Family::sine, 1.0), IntervalMap(Family::tent, 1.7)}) {
    for (int i = 0; i < 2000; ++i) {
      const double x = unit_uniform(rng);
      const std::size_t b = x < 0.5 ? 0 : 1;
      const double y = m.eval(b, x);
      EXPECT_NEAR(m.inverse(b, y), x, 1e-7) << m.name() << " x=" << x;
      // The forward residual is the well-conditioned check.
      EXPECT_NEAR(m.eval(b, m.inverse(b, y)), y, 1e-14) << m.name();
    }
  }
}

// Property: the analytic derivative matches a central difference.
TEST(CoreMaps, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  for (const IntervalMap& m : {IntervalMap(Family::logistic, 3.8), IntervalMap(Family::sine, 1.0)}) {
    for (int i = 0; i < 500; ++i) {
      const double x = 0.01 + 0.98 * unit_uniform(rng);
      if (std::fabs(x - 0.5) < 1e-3) continue;
      const double h = 1e-6;
      const std::size_t b = x < 0.5 ? 0 : 1;
      const double fd = (m.eval(b, x + h) - m.eval(b, x - h)) / (2 * h);
      EXPECT_NEAR(m.derivative(x), fd, 1e-6);
    }
  }
}

TEST(CoreMaps, OrbitAndClamp) {
  const IntervalMap f(Family::logistic, 4.0);
  const auto orbit = eval_orbit(f, 0.5, 3);
  ASSERT_EQ(orbit.size(), 4u);
  EXPECT_EQ(orbit[1], 1.0);
  EXPECT_EQ(orbit[2], 0.0);
  EXPECT_EQ(orbit[3], 0.0);
  EXPECT_EQ(detail::clamp_to_domain(f, 1.0 + 5e-13, 0), 1.0);
  EXPECT_EQ(detail::clamp_to_domain(f, -5e-13, 0), 0.0);
  try {
    detail::clamp_to_domain(f, 1.1, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain_escape);
    EXPECT_EQ(*e.index(), 7u);
  }
  EXPECT_THROW(eval_orbit(f, 1.5, 3), Error);
}

TEST(CoreMaps, CriticalHitIsAnError) {
  const IntervalMap f(Family::logistic, 4.0);
  try {
    log_deriv_sum(f, 0.25, 5);  // 0.25 -> 0.75 fixed: fine
    log_deriv_sum(f, 0.5, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::derivative_zero);
    EXPECT_EQ(*e.index(), 0u);
  }
  // The tent corner has slope s from either side.
  EXPECT_NEAR(log_deriv_sum(IntervalMap(Family::tent, 2.0), 0.5, 10), 10 * std::log(2.0), 1e-12);
}

TEST(CoreMaps, LogDerivSumOnFixedPoint) {
  const IntervalMap f(Family::logistic, 4.0);
  EXPECT_NEAR(log_deriv_sum(f, 0.75, 100), 100 * std::log(2.0), 1e-12);
  const IntervalMap t(Family::tent, 1.7);
  EXPECT_NEAR(log_deriv_sum(t, 0.123, 1000), 1000 * std::log(1.7), 1e-9);
}

// Cocycle identity S_{m+n}(x) = S_m(x) + S_n(f^m x), exact in high fidelity.
TEST(CoreMaps, CocycleIdentityExactInHighFidelity) {
  const IntervalMap f(Family::logistic, 4.0);
  const std::vector<double> terms = log_deriv_terms_high(f, 0.1234567, 300);
  for (std::size_t m : {1u, 17u, 150u, 299u}) {
    ExactSum whole, head, tail;
    for (std::size_t i = 0; i < 300; ++i) whole += terms[i];
    for (std::size_t i = 0; i < m; ++i) head += terms[i];
    for (std::size_t i = m; i < 300; ++i) tail += terms[i];
    ExactSum joined = head;
    joined += tail;
    EXPECT_TRUE(joined == whole) << "m=" << m;
  }
}

// Before chaotic divergence the double orbit and the extended-precision orbit
// of the same double start give the same sums. For logistic(4) rounding
// errors double each step and are amplified again next to c, so n <= 12
// keeps them below 1e-10 for arbitrary starts.
TEST(CoreMaps, HighFidelityMatchesDoubleForShortOrbits) {
  std::mt19937_64 rng(3);
  const IntervalMap f(Family::logistic, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = unit_uniform(rng);
    for (std::size_t n : {4u, 8u, 12u}) {
      const double fast = log_deriv_sum(f, x, n) / static_cast<double>(n);
      const double high = log_deriv_sum_high(f, x, n).value() / static_cast<double>(n);
      EXPECT_NEAR(fast, high, 1e-10) << "x=" << x << " n=" << n;
    }
  }
}

TEST(CoreMaps, HighFidelityPrecisionGrowsWithLength) {
  const IntervalMap f(Family::logistic, 4.0);
  EXPECT_EQ(high_fidelity_bits(f, 100), 2 * 100 + 128);
  EXPECT_EQ(high_fidelity_bits(IntervalMap(Family::sine, 1.0), 100), 166 + 128);
  EXPECT_EQ(high_fidelity_bits(IntervalMap(Family::logistic, 1.5), 100), 100 + 128);
}

TEST(CoreMaps, Pullback) {
  const IntervalMap f(Family::logistic, 4.0);
  const Interval left = pullback(f, 0, Interval{0.75, 1.0});
  EXPECT_NEAR(left.lo, 0.25, 1e-15);
  EXPECT_NEAR(left.hi, 0.5, 1e-15);
  const Interval right = pullback(f, 1, Interval{0.75, 1.0});
  EXPECT_NEAR(right.lo, 0.5, 1e-15);
  EXPECT_NEAR(right.hi, 0.75, 1e-15);
  const IntervalMap g(Family::logistic, 3.0);
  try {
    pullback(g, 0, Interval{0.8, 0.9});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_intersection);
  }
  // Partial overlap pulls back the intersection.
  const Interval part = pullback(g, 0, Interval{0.5, 0.9});
  EXPECT_NEAR(part.hi, 0.5, 1e-15);
}

TEST(CoreMaps, BigFloatBasics) {
  PrecisionScope scope(400);
  const BigFloat a(0.1);
  EXPECT_EQ(a.precision(), 400);
  const BigFloat third = BigFloat(1.0) / 3.0;
  EXPECT_NEAR((third * 3.0).to_double(), 1.0, 1e-30);
  const BigFloat tiny = BigFloat(1.0) / BigFloat(2.0);
  EXPECT_DOUBLE_EQ(tiny.log2_abs(), -1.0);
  BigFloat huge(1.0);
  for (int i = 0; i < 300; ++i) huge = huge / 1e10;
  EXPECT_NEAR(huge.log2_abs(), -3000 * std::log2(10.0), 1e-9);
  EXPECT_NEAR(BigFloat::pi().to_double(), std::numbers::pi, 0.0);
}
