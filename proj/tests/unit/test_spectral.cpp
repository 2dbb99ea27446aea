#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kppfront/spectral.hpp"
#include "kppfront/wavespeed.hpp"
#include "kppfront/errors.hpp"
#include "oracles.hpp"

using namespace kppfront;

namespace {

MediumSpec periodic_1d() {
  MediumSpec s = MediumSpec::homogeneous(1);
  s.growth = TrigPolynomial::parse("1 + 0.5*sin(1)", 1);
  return s;
}

double r1(double x) { return 1 + 0.5 * std::sin(2 * std::numbers::pi * x); }

}  // namespace

TEST(Principal, HomogeneousSymbol) {
  std::vector<double> A{4, 0, 0, 1};
  const double e[2] = {0.6, 0.8};
  auto spec = MediumSpec::diagonal({4, 1});
  for (double lam : {0.0, 0.3, 1.0, 2.5}) {
    auto p = principal_pair(assemble_operator(spec, e, lam, TorusGrid(2, 16)), 1e-12);
    EXPECT_NEAR(p.k, oracle::homogeneous_k(A, {0.6, 0.8}, lam, 1), 1e-9) << lam;
    EXPECT_GT(p.phi.minCoeff(), 0);
    EXPECT_NEAR(p.phi.maxCoeff(), 1, 1e-14);
  }
}

TEST(Principal, DenseOracleAt512) {
  auto spec = periodic_1d();
  const double e[1] = {1};
  for (double lam : {0.4, 1.0, 1.7}) {
    auto p = principal_pair(assemble_operator(spec, e, lam, TorusGrid(1, 512)), 1e-12);
    double ref = oracle::dense_principal_1d(1.0, r1, lam, 512);
    EXPECT_NEAR(p.k, ref, 1e-8) << lam;
    EXPECT_LT(p.residual, 1e-8);
  }
}

TEST(Principal, GridConvergence) {
  auto spec = periodic_1d();
  const double e[1] = {1};
  double ref = oracle::dense_principal_1d(1.0, r1, 1.0, 512);
  double e16 = std::fabs(principal_pair(assemble_operator(spec, e, 1.0, TorusGrid(1, 16))).k - ref);
  double e32 = std::fabs(principal_pair(assemble_operator(spec, e, 1.0, TorusGrid(1, 32))).k - ref);
  EXPECT_LT(e32, e16 / 3);  // second order
}

TEST(Principal, WarmStartSameAnswer) {
  auto spec = periodic_1d();
  const double e[1] = {1};
  TorusGrid g(1, 64);
  auto p0 = principal_pair(assemble_operator(spec, e, 1.0, g), 1e-12);
  auto p1 = principal_pair(assemble_operator(spec, e, 1.05, g), 1e-12, 10000, &p0.phi);
  auto p2 = principal_pair(assemble_operator(spec, e, 1.05, g), 1e-12);
  EXPECT_NEAR(p1.k, p2.k, 1e-10);
}

TEST(Dispersion, ConvexAndSymmetric) {
  auto spec = periodic_1d();
  const double e[1] = {1};
  std::vector<double> lam;
  for (int i = 0; i <= 20; ++i) lam.push_back(-2 + 0.2 * i);
  auto rep = dispersion_curve(spec, e, lam, TorusGrid(1, 64), 1e-11);
  EXPECT_LE(rep.convexity_violation, 1e-6);
  // k(lambda) = k(-lambda) for divergence-form operators
  for (std::size_t i = 0; i < lam.size(); ++i)
    EXPECT_NEAR(rep.samples[i].k, rep.samples[lam.size() - 1 - i].k, 1e-8);
}

TEST(Dispersion, AdjointSlopeMatchesDifference) {
  auto spec = periodic_1d();
  const double e[1] = {1};
  DispersionEvaluator ev(spec, e, TorusGrid(1, 64), 1e-12);
  auto [k, dk] = ev.slope(0.9);
  double h = 1e-4;
  double fd = (ev.k(0.9 + h) - ev.k(0.9 - h)) / (2 * h);
  EXPECT_NEAR(dk, fd, 1e-6);
  EXPECT_NEAR(k, ev.k(0.9), 1e-10);
}
