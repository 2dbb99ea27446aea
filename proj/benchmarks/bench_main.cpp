#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "kppfront/front.hpp"
#include "kppfront/rational_geometry.hpp"
#include "kppfront/spectral.hpp"
#include "kppfront/wavespeed.hpp"

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

void BM_LatticeDecompose(benchmark::State& state) {
  RationalDirection z({Rational(2, 7), Rational(3, 7), Rational(6, 7)});
  auto f = orthogonal_basis(z);
  auto L = lattice_periods(f);
  std::vector<long> k{4, -9, 7};
  for (auto _ : state) {
    auto p = decompose_integer_vector(k, f, L);
    benchmark::DoNotOptimize(reconstruction_holds(k, p, L));
  }
}
BENCHMARK(BM_LatticeDecompose);

void BM_Rationalize(benchmark::State& state) {
  const double e[3] = {0.48, 0.6, 0.64};
  for (auto _ : state) benchmark::DoNotOptimize(rationalize_direction(e, 1e-6, 1000000));
}
BENCHMARK(BM_Rationalize);

void BM_PrincipalPair(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto spec = sinusoidal_2d();
  const double e[2] = {0.6, 0.8};
  auto op = assemble_operator(spec, e, 0.8, TorusGrid(2, n));
  for (auto _ : state) benchmark::DoNotOptimize(principal_pair(op, 1e-10).k);
  state.SetComplexityN(static_cast<long>(n * n));
}
BENCHMARK(BM_PrincipalPair)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MinimalSpeed(benchmark::State& state) {
  auto spec = sinusoidal_2d();
  const double e[2] = {0.6, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(minimal_speed(spec, e, TorusGrid(2, 32), 1e-8).c_star);
}
BENCHMARK(BM_MinimalSpeed)->Unit(benchmark::kMillisecond);

void BM_PeriodicLinearSolve(benchmark::State& state) {
  auto spec = MediumSpec::homogeneous(1);
  const double e[1] = {1};
  MovingCoefficients mc(spec, moving_frame(e), 2.5);
  const std::size_t n = static_cast<std::size_t>(state.range(0)), nt = 16;
  auto g = StripGrid::make(20, n, nt, 0.4, {}, {}, {});
  std::vector<double> rhs(g.size(), 0.1);
  BoundaryData bc;
  bc.left.assign(nt, 1.0);
  bc.right.assign(nt, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(periodic_linear_solve(mc, 3.0, rhs, bc, g, 1e-12));
}
BENCHMARK(BM_PeriodicLinearSolve)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_Strip1D(benchmark::State& state) {
  StripResolution r;
  r.n_xi = 300;
  r.n_t = 16;
  r.torus = TorusGrid(1, 16);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_strip(MediumSpec::homogeneous(1), RationalDirection::axis(1, 0), 2.5, 15, r, StripTolerances{}));
}
BENCHMARK(BM_Strip1D)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
