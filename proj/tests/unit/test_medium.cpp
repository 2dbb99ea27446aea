#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kppfront/errors.hpp"
#include "kppfront/medium.hpp"
#include "kppfront/rational_geometry.hpp"

using namespace kppfront;

namespace {

MediumSpec sinusoidal_2d() {
  MediumSpec s;
  s.dimension = 2;
  auto a = TrigPolynomial::parse("1 + 0.25*sin(0,1)", 2);
  s.diffusion = {a, ScalarField::constant(2, 0), a};
  s.growth = TrigPolynomial::parse("1 + 0.5*sin(1,0)", 2);
  return s;
}

}  // namespace

TEST(TrigPolynomial, ParseAndEvaluate) {
  auto p = TrigPolynomial::parse("1 + 0.5*sin(1,0) - 0.2 cos(0,2)", 2);
  const double x[2] = {0.25, 0.25};
  EXPECT_NEAR(p.value(x), 1 + 0.5 - 0.2 * std::cos(std::numbers::pi), 1e-14);
  EXPECT_NEAR(p.min_sample_bound(), 0.3, 1e-14);
  double g[2];
  const double z[2] = {0, 0};
  p.gradient(z, g);
  EXPECT_NEAR(g[0], 0.5 * 2 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(g[1], 0, 1e-12);
}

TEST(TrigPolynomial, RejectsGarbage) {
  EXPECT_THROW(TrigPolynomial::parse("1 + sin(1,", 2), Error);
  EXPECT_THROW(TrigPolynomial::parse("1 + 0.5*sin(1,0,0)", 2), Error);
}

TEST(GriddedField, MultilinearAndPeriodic) {
  GriddedField g({4}, {0, 1, 2, 3});
  const double a[1] = {0.125}, b[1] = {1.125}, c[1] = {0.875};
  EXPECT_NEAR(g.value(a), 0.5, 1e-14);
  EXPECT_NEAR(g.value(b), 0.5, 1e-14);
  EXPECT_NEAR(g.value(c), 1.5, 1e-14);  // wraps from 3 back to 0
}

TEST(Audit, LogisticPasses) {
  auto r = audit_medium(MediumSpec::homogeneous(2), 8, 32);
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_NEAR(r.gamma_ell, 1, 1e-12);
  EXPECT_NEAR(r.sup_abs_fu, 1, 1e-12);
}

TEST(Audit, WeakAlleeFailsRatio) {
  auto s = MediumSpec::homogeneous(1);
  s.family = ReactionFamily::WeakAllee;
  auto r = audit_medium(s, 8, 64);
  EXPECT_FALSE(r.monotone_ratio_ok);
  EXPECT_FALSE(r.witnesses.empty());
  EXPECT_THROW(validate_medium(s, 8, 64), ValidationFailed);
}

TEST(Audit, NonEllipticRejected) {
  auto s = MediumSpec::diagonal({1.0, -0.5});
  auto r = audit_medium(s, 8, 16);
  EXPECT_FALSE(r.elliptic_ok);
}

TEST(Audit, SinusoidalBounds) {
  auto r = audit_medium(sinusoidal_2d(), 32, 16);
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_NEAR(r.gamma_ell, 0.75, 1e-3);
  EXPECT_NEAR(r.Gamma_ell, 1.25, 1e-3);
  EXPECT_NEAR(r.growth_max, 1.5, 1e-3);
}

TEST(MovingCoefficients, LatticeShiftLeavesCoefficientsInvariant) {
  auto spec = sinusoidal_2d();
  RationalDirection z({Rational(3, 5), Rational(4, 5)});
  auto F = moving_frame(z.to_double(), orthogonal_basis(z));
  MovingCoefficients mc(spec, F, 2.3);
  const long ks[][2] = {{1, 0}, {0, 1}, {2, -1}, {-3, 4}};
  for (const auto& k : ks) {
    double dt = 0, dy[1] = {0};
    mc.lattice_shift(k, dt, dy);
    const double y0[1] = {0.37};
    const double y1[1] = {0.37 + dy[0]};
    EXPECT_NEAR(mc.growth(0.4, 0.1, y0), mc.growth(0.4, 0.1 + dt, y1), 1e-12);
    EXPECT_NEAR((mc.diffusion(0.4, 0.1, y0) - mc.diffusion(0.4, 0.1 + dt, y1)).norm(), 0, 1e-12);
  }
}

TEST(ReactionH0, Logistic) {
  // f/(1-u) = u for logistic with r = 1; min over [alpha,1] is alpha
  EXPECT_NEAR(reaction_h0(MediumSpec::homogeneous(1), 0.5, 4, 64), 0.5, 1e-12);
}

TEST(ReactionFamily, RoundTrip) {
  for (auto f : {ReactionFamily::Logistic, ReactionFamily::WeakAllee, ReactionFamily::GeneralizedLogistic})
    EXPECT_EQ(parse_reaction_family(to_string(f)), f);
  EXPECT_THROW(parse_reaction_family("bistable"), Error);
}
