#include <gtest/gtest.h>

#include <cmath>

#include "kppfront/front.hpp"
#include "kppfront/reconstruct.hpp"

using namespace kppfront;

namespace {

const FrontProfile& front_1d() {
  static const FrontProfile p = [] {
    StripResolution r;
    r.n_xi = 240;
    r.n_t = 4;
    r.torus = TorusGrid(1, 16);
    const double sched[2] = {16, 24};
    return front_from_strips(MediumSpec::homogeneous(1), RationalDirection::axis(1, 0), 2.5, sched, r,
                             StripTolerances{});
  }();
  return p;
}

}  // namespace

TEST(Frame, RoundTrip) {
  const double e[2] = {0.6, 0.8};
  auto F = moving_frame(e);
  const double x[2] = {1.3, -0.7};
  double xi = 0, y[1] = {0}, back[2];
  frame_coordinates(F, 2.1, 0.4, x, xi, y);
  EXPECT_NEAR(xi, 0.6 * 1.3 + 0.8 * -0.7 - 2.1 * 0.4, 1e-14);
  physical_point(F, 2.1, xi, 0.4, y, back);
  EXPECT_NEAR(back[0], x[0], 1e-14);
  EXPECT_NEAR(back[1], x[1], 1e-14);
}

TEST(LatticeBox, Count) {
  EXPECT_EQ(lattice_box(2, 2).size(), 25u);
  EXPECT_EQ(lattice_box(3, 1).size(), 27u);
}

TEST(Halton, InUnitCube) {
  for (std::size_t i = 0; i < 50; ++i)
    for (double v : halton_point(i, 3)) {
      EXPECT_GE(v, 0);
      EXPECT_LT(v, 1);
    }
  EXPECT_NE(halton_point(1, 2), halton_point(2, 2));
}

TEST(Reconstruct, TravelsAtSpeedC) {
  const auto& p = front_1d();
  PhysicalSolution u(p);
  const double x0[1] = {0.3};
  const double x1[1] = {0.3 + 2.5 * 0.8};
  EXPECT_NEAR(u(0.0, x0), u(0.8, x1), 1e-12);
  EXPECT_NEAR(reconstruct_solution(p, 0.0, x0), u(0.0, x0), 0);
}

TEST(Reconstruct, PulsatingResidualOneDimensional) {
  const auto& p = front_1d();
  EXPECT_LT(pulsating_residual(p, lattice_box(1, 2), 64, 1), 1e-10);
}

TEST(Reconstruct, ResidualsAndMonotonicity) {
  const auto& p = front_1d();
  auto r = pde_residual(p, 8, 128, 2);
  EXPECT_GT(r.nodes, 0u);
  EXPECT_LT(r.interior, 5e-3);
  EXPECT_GE(monotonicity_check(p, 128, 3), -1e-6);
}
