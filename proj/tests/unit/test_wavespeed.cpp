#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kppfront/errors.hpp"
#include "kppfront/wavespeed.hpp"

using namespace kppfront;

TEST(MinimalSpeed, Homogeneous) {
  auto spec = MediumSpec::homogeneous(2);
  const double e[2] = {0.6, 0.8};
  auto s = minimal_speed(spec, e, TorusGrid(2, 8), 1e-10);
  EXPECT_NEAR(s.c_star, 2, 1e-8);
  EXPECT_NEAR(s.lambda_star, 1, 1e-7);
  EXPECT_LT(s.first_order_defect, 1e-6);
}

TEST(MinimalSpeed, AnisotropicClosedForm) {
  auto spec = MediumSpec::diagonal({4, 1});
  for (double th : {0.0, 0.3, std::numbers::pi / 4, 1.2}) {
    const double e[2] = {std::cos(th), std::sin(th)};
    auto s = minimal_speed(spec, e, TorusGrid(2, 8), 1e-10);
    double exact = 2 * std::sqrt(4 * e[0] * e[0] + e[1] * e[1]);
    EXPECT_NEAR(s.c_star, exact, 1e-7) << th;
  }
}

TEST(MinimalSpeed, GrowthScalesSpeed) {
  // r = 4: c* = 2 sqrt(r) = 4
  auto spec = MediumSpec::homogeneous(1, 4.0);
  const double e[1] = {1};
  EXPECT_NEAR(minimal_speed(spec, e, TorusGrid(1, 8)).c_star, 4, 1e-7);
}

TEST(DecayRates, Logistic) {
  auto spec = MediumSpec::homogeneous(1);
  const double e[1] = {1};
  auto r = decay_rates(spec, e, 2.5, TorusGrid(1, 8), 1e-12);
  EXPECT_NEAR(r.lambda_minus, 0.5, 1e-9);
  EXPECT_NEAR(r.lambda_plus, 2.0, 1e-9);
  EXPECT_LT(r.residual_minus, 1e-9);
  EXPECT_THROW(decay_rates(spec, e, 1.9, TorusGrid(1, 8)), NoRoot);
}

TEST(DecayRates, MonotoneInSpeed) {
  auto spec = MediumSpec::homogeneous(1);
  spec.growth = TrigPolynomial::parse("1 + 0.5*sin(1)", 1);
  const double e[1] = {1};
  TorusGrid g(1, 32);
  double c0 = minimal_speed(spec, e, g).c_star;
  double lm = 1e9, lp = -1e9;
  for (double dc : {0.05, 0.2, 0.5, 1.0}) {
    auto r = decay_rates(spec, e, c0 + dc, g);
    EXPECT_LE(r.lambda_minus, lm);
    EXPECT_GE(r.lambda_plus, lp);
    lm = r.lambda_minus;
    lp = r.lambda_plus;
  }
}

TEST(Sweep, IsotropicIsFlatAndJumpShrinks) {
  auto spec = MediumSpec::diagonal({4, 1});
  auto t16 = speed_sweep(spec, 16, TorusGrid(2, 8), 1e-9);
  auto t64 = speed_sweep(spec, 64, TorusGrid(2, 8), 1e-9);
  ASSERT_EQ(t16.entries.size(), 16u);
  for (const auto& e : t16.entries) EXPECT_TRUE(e.ok) << e.error;
  EXPECT_LT(t64.max_adjacent_jump, t16.max_adjacent_jump);
}

TEST(Sweep, ThreeDimensionalLayout) {
  auto spec = MediumSpec::homogeneous(3);
  auto t = speed_sweep(spec, 16, TorusGrid(3, 8), 1e-8);
  EXPECT_EQ(t.rows * t.cols, t.entries.size());
  for (const auto& e : t.entries) EXPECT_NEAR(e.c_star, 2, 1e-6);
}
