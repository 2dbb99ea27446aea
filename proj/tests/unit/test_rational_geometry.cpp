#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kppfront/errors.hpp"
#include "kppfront/rational_geometry.hpp"
#include "oracles.hpp"

using namespace kppfront;

namespace {

// exact rational point on the sphere by inverse stereographic projection
RationalDirection random_rational_direction(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    std::vector<long> m(n - 1);
    long q = 1 + static_cast<long>(rng() % 9), mm = 0;
    for (auto& v : m) {
      v = static_cast<long>(rng() % 19) - 9;
      mm += v * v;
    }
    if (mm == 0) continue;
    std::vector<Rational> c(n);
    c[0] = Rational(mm - q * q, mm + q * q);
    for (std::size_t i = 1; i < n; ++i) c[i] = Rational(2 * q * m[i - 1], mm + q * q);
    return RationalDirection(std::move(c));
  }
}

bool parallel(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  // a x b = 0 componentwise in every 2x2 minor
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i] * b[j] != a[j] * b[i]) return false;
  return true;
}

}  // namespace

TEST(RationalDirection, RejectsNonUnit) {
  EXPECT_THROW(RationalDirection({Rational(1, 2), Rational(1, 2)}), InvalidArgument);
  EXPECT_NO_THROW(RationalDirection({Rational(3, 5), Rational(-4, 5)}));
}

TEST(RationalDirection, AxisAndDenominator) {
  auto z = RationalDirection::axis(3, 1, -1);
  EXPECT_EQ(z[1], Rational(-1));
  EXPECT_EQ(z.max_denominator(), 1);
  RationalDirection w({Rational(5, 13), Rational(12, 13)});
  EXPECT_EQ(w.max_denominator(), 13);
}

TEST(Rationalize, ExactUnitNorm) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N01;
  for (std::size_t n : {2u, 3u, 4u})
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> e(n);
      double s2 = 0;
      for (auto& v : e) {
        v = N01(rng);
        s2 += v * v;
      }
      for (auto& v : e) v /= std::sqrt(s2);
      auto z = rationalize_direction(e, 1e-3, 100000);
      Rational s = 0;
      for (const auto& q : z.coords()) s += q * q;
      EXPECT_EQ(s, 1);
    }
}

TEST(Rationalize, AngleImprovesWithDenominator) {
  const double e[2] = {std::cos(1.0), std::sin(1.0)};
  double prev = 10;
  for (long d : {10L, 100L, 1000L, 10000L, 100000L}) {
    auto z = closest_rational_direction(e, d);
    double ang = angle_between(z, e);
    EXPECT_LE(ang, prev + 1e-15) << d;
    prev = ang;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(Rationalize, DiagonalHasNoSymmetricAnswer) {
  const double e[2] = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  auto z = rationalize_direction(e, 1e-4, 1000);
  EXPECT_NE(abs(z[0]), abs(z[1]));
  EXPECT_LE(angle_between(z, e), 1e-4);
}

TEST(Rationalize, UnreachableTolerance) {
  const double e[2] = {std::cos(1.0), std::sin(1.0)};
  EXPECT_THROW(rationalize_direction(e, 1e-12, 10), ToleranceUnreachable);
}

TEST(Rationalize, RationalInputIsExact) {
  const double e[2] = {0.6, 0.8};
  auto z = rationalize_direction(e, 1e-8, 1000);
  EXPECT_EQ(z[0], Rational(3, 5));
  EXPECT_EQ(z[1], Rational(4, 5));
}

TEST(OrthogonalBasis, TwoDimensionalRotation) {
  RationalDirection z({Rational(3, 5), Rational(4, 5)});
  auto f = orthogonal_basis(z);
  ASSERT_EQ(f.basis.size(), 2u);
  EXPECT_EQ(f.basis[1][0], Rational(-4, 5));
  EXPECT_EQ(f.basis[1][1], Rational(3, 5));
  EXPECT_FALSE(f.gram_schmidt);
}

TEST(OrthogonalBasis, MatchesPlainGramSchmidt) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {3u, 4u})
    for (int rep = 0; rep < 25; ++rep) {
      auto z = random_rational_direction(rng, n);
      auto f = orthogonal_basis(z);
      ASSERT_EQ(f.basis.size(), n);
      EXPECT_TRUE(parallel(f.basis[0], z.coords()));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(dot(f.basis[i], f.basis[j]), 0);
        EXPECT_EQ(dot(f.basis[i], f.basis[i]), f.norms_squared[i]);
      }
      // the oracle basis spans the same space; each library vector lies in it
      auto g = oracle::gram_schmidt(z.coords());
      ASSERT_EQ(g.size(), n);
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Rational> rest(n, Rational(0));
        for (const auto& u : g) {
          Rational c = dot(f.basis[i], u) / dot(u, u);
          for (std::size_t j = 0; j < n; ++j) rest[j] += c * u[j];
        }
        EXPECT_EQ(rest, f.basis[i]);
      }
    }
}

TEST(Lattice, AgreesWithBruteForce) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {2u, 3u}) {
    for (int rep = 0; rep < 10; ++rep) {
      auto z = random_rational_direction(rng, n);
      auto f = orthogonal_basis(z);
      auto L = lattice_periods(f);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(L.gcds[i], oracle::brute_rational_gcd(f.basis[i]));
      std::vector<long> k(n);
      for (int trial = 0; trial < 30; ++trial) {
        for (auto& v : k) v = static_cast<long>(rng() % 21) - 10;
        auto p = decompose_integer_vector(k, f, L);
        std::vector<mpq_class> pb;
        ASSERT_TRUE(oracle::brute_decomposition(k, f.basis, pb));
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(Rational(p[i]), pb[i]);
        EXPECT_TRUE(reconstruction_holds(k, p, L));
        auto back = reconstruct_integer_vector(p, f, L);
        for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(back[j], Rational(k[j]));
      }
    }
  }
}

TEST(Lattice, SmallPathMatchesGmp) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int rep = 0; rep < 10; ++rep) {
      auto f = orthogonal_basis(random_rational_direction(rng, n));
      auto fast = lattice_periods(f);
      if (!fast.small) continue;
      auto slow = fast;
      slow.small = false;
      std::vector<long> k(n);
      for (int trial = 0; trial < 50; ++trial) {
        for (auto& v : k) v = static_cast<long>(rng() % 401) - 200;
        EXPECT_EQ(decompose_integer_vector(k, f, fast), decompose_integer_vector(k, f, slow));
      }
    }
  }
}

TEST(Lattice, ThreeFourFiveCell) {
  RationalDirection z({Rational(3, 5), Rational(4, 5)});
  auto L = lattice_periods(orthogonal_basis(z));
  EXPECT_EQ(L.gcds[0], Rational(1, 5));
  // time cell 1/5 (divided by c later), transverse cell 5
  EXPECT_NEAR(L.cell_periods[1].value(), 5.0, 1e-14);
  ASSERT_EQ(L.twist.size(), 1u);
  EXPECT_EQ(L.twist[0].get_den() % 5, 0);
  // k* . zeta = g_1
  Rational s = 0;
  for (std::size_t j = 0; j < 2; ++j) s += Rational(L.time_generator[j]) * z[j];
  EXPECT_EQ(s, L.gcds[0]);
}

TEST(Lattice, AxisDirectionIsTrivial) {
  auto z = RationalDirection::axis(3, 2);
  auto L = lattice_periods(orthogonal_basis(z));
  for (const auto& t : L.twist) EXPECT_EQ(t, 0);
  for (const auto& g : L.gcds) EXPECT_EQ(g, 1);
}

TEST(RationalGcd, Basic) {
  std::vector<Rational> v{Rational(3, 5), Rational(4, 5)};
  EXPECT_EQ(rational_gcd(v), Rational(1, 5));
  std::vector<Rational> w{Rational(1, 2), Rational(1, 3)};
  EXPECT_EQ(rational_gcd(w), Rational(1, 6));
}

TEST(MovingFrame, Orthonormal) {
  const double e[3] = {2.0 / 3, 1.0 / 3, 2.0 / 3};
  auto F = moving_frame(e);
  Eigen::MatrixXd I = F.R.transpose() * F.R;
  EXPECT_LT((I - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-13);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(F.R(i, 0), e[i], 1e-15);
}
