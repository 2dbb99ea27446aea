#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kppfront/fields.hpp"
#include "kppfront/medium.hpp"
#include "kppfront/rational_geometry.hpp"
#include "kppfront/spectral.hpp"
#include "kppfront/wavespeed.hpp"

namespace kppfront {

enum class TimeScheme { ImplicitEuler, CrankNicolson };
enum class SandwichPolicy { Raise, Report };

struct SubSuperPair {
  double c = 0;
  double c_star = 0;
  std::vector<double> e;
  double lambda_c = 0;
  double lambda_plus = 0;
  double delta = 0;
  double r_delta = 0;
  double K = 0;
  double K1 = 0;
  double gamma = 0;  // inflated gamma_kpp
  double theta = 1;
  double a0 = 0;
  double sup_power_ratio = 0;  // sup Phi_c^{1+theta} / Phi_d
  double sup_ratio = 0;        // sup Phi_c / Phi_d
  double sup_inverse_ratio = 0;  // sup Phi_d / Phi_c
  double min_phi_c = 0;
  double M = 0;  // monotonicity shift sup|f_u| * 1.1 + 1
  EigenPair phi_c;
  EigenPair phi_d;
  PeriodicInterpolant interp_c;
  PeriodicInterpolant interp_d;

  double psi_plus(double xi, std::span<const double> X) const;
  double psi_minus(double xi, std::span<const double> X) const;
};

SubSuperPair build_subsuper(const MediumSpec& spec, std::span<const double> e, double c, const TorusGrid& grid,
                            double theta, double tol = 1e-8);

// Discretization parameters of a strip. n_xi is the interval count for the
// requested half-width; if a is enlarged the spacing is kept.
struct StripResolution {
  std::size_t n_xi = 600;
  std::size_t n_t = 64;
  std::vector<std::size_t> n_y;  // per y axis, rounded up to twist multiples
  TorusGrid torus{1, 32};
};

struct StripGrid {
  double a = 0;
  std::size_t n_xi = 0;  // intervals; nodes j = 0..n_xi
  double h_xi = 0;
  std::size_t n_t = 0;   // levels per minimal period
  double period = 0;     // g_1 / c
  double dt = 0;
  std::vector<std::size_t> n_y;
  std::vector<double> cell;     // y periods
  std::vector<double> h_y;
  std::vector<long> twist;      // y shift per period, in grid cells
  std::vector<double> twist_length;  // same, as lengths

  static StripGrid make(double a, std::size_t n_xi, std::size_t n_t, double period, std::vector<std::size_t> n_y,
                        std::vector<double> cell, std::vector<double> twist_fraction);

  std::size_t y_count() const;
  std::size_t nodes() const { return (n_xi + 1) * y_count(); }
  std::size_t size() const { return nodes() * n_t; }
  double xi(std::size_t j) const { return -a + h_xi * static_cast<double>(j); }
  // y coordinates of flat y index
  void y_at(std::size_t iy, std::span<double> y) const;
  std::size_t index(std::size_t level, std::size_t j, std::size_t iy) const {
    return level * nodes() + iy * (n_xi + 1) + j;
  }
};

// Boundary values per level and flat y index.
struct BoundaryData {
  std::vector<double> left;
  std::vector<double> right;
};

struct PeriodicSolveReport {
  std::size_t sweeps = 0;
  double defect = 0;
  double contraction = 0;  // geometric mean of late defect ratios
};

class MovingCoefficients;

// Space-time periodic linear solver for (d_t + L + M) v = rhs on a strip.
class PeriodicStripSolver {
public:
  PeriodicStripSolver(const MovingCoefficients& coeffs, double M, const StripGrid& grid, TimeScheme scheme);
  ~PeriodicStripSolver();
  PeriodicStripSolver(PeriodicStripSolver&&) noexcept;
  PeriodicStripSolver& operator=(PeriodicStripSolver&&) noexcept;

  // values holds all levels; level 0 is the warm start. fixed_sweeps > 0 runs
  // exactly that many period sweeps without a convergence test.
  PeriodicSolveReport solve(std::span<const double> rhs, const BoundaryData& bc, std::vector<double>& values,
                            double tol, std::size_t fixed_sweeps = 0, std::size_t stagnation = 50,
                            std::size_t max_sweeps = 200000) const;
  // one period of the semi-implicit nonlinear scheme with the reaction lagged by one step
  double evolve_period(const MediumSpec& spec, std::span<const double> growth, const BoundaryData& bc,
                       std::vector<double>& values) const;
  // (L + M) v at one level, interior rows only
  void apply(std::size_t level, std::span<const double> v, std::span<double> out) const;
  void shift(std::span<const double> in, std::span<double> out) const;  // twist S

  const StripGrid& grid() const;
  double M() const;

private:
  struct Impl;
  Impl* impl_;
};

std::vector<double> periodic_linear_solve(const MovingCoefficients& coeffs, double M, std::span<const double> rhs,
                                          const BoundaryData& bc, const StripGrid& grid, double tol_inner,
                                          TimeScheme scheme = TimeScheme::ImplicitEuler,
                                          PeriodicSolveReport* report = nullptr,
                                          const std::vector<double>* warm_start = nullptr);

struct StripTolerances {
  double tol_inner = 1e-12;
  double tol_outer = 1e-9;
  std::size_t max_outer = 20000;
  std::size_t inner_sweeps = 0;  // 0: converge every inner solve
  std::size_t stagnation_sweeps = 50;
  double eig_tol = 1e-10;
  double speed_tol = 1e-8;
  TimeScheme scheme = TimeScheme::ImplicitEuler;
  SandwichPolicy sandwich = SandwichPolicy::Raise;
  double sandwich_tol = 1e-8;
  double tol_limit = 1e-4;
  double eps_right = 1e-2;
  double eps_left = 1e-2;
  double alpha_low = 0.5;
  double tail_lo = 5;
  double tail_hi = 15;
  double window_fraction = 0.8;
  bool direct_evolution = false;
  std::size_t threads = 1;
};

struct StripSolution {
  StripGrid grid;
  std::vector<double> values;
  std::vector<double> lower;  // max(0, psi-)
  std::vector<double> upper;  // min(1, psi+)
  BoundaryData bc;
  std::size_t outer_iterations = 0;
  std::size_t total_sweeps = 0;
  double min_monotone_defect = 0;
  double max_sandwich_excursion = 0;
  double period_defect = 0;
  double contraction = 0;
  double final_update = 0;
  double clip_magnitude = 0;
  double M = 0;
  double c = 0;
  std::vector<double> update_history;
  SubSuperPair bounds;
};


StripSolution solve_strip(const MediumSpec& spec, const RationalDirection& zeta, double c, double a,
                          const StripResolution& res, const StripTolerances& tols);

struct LimitCertificate {
  double alpha = 0.5;
  double h0 = 0;
  double mu = 0;
  double C0 = 0;
  double K_prime = 0;
  double max_tail_ratio = 0;  // max over xi <= -K' of (1 - phi) / (C0 e^{mu xi})
  bool holds = false;
  std::size_t samples = 0;
};

struct FrontProfile {
  MediumSpec spec;
  RationalDirection zeta;
  OrthogonalFrame frame;
  LatticeDecomposition lattice;
  FrameMatrix R;
  std::vector<double> e;
  double c = 0;
  double c_star = 0;
  double lambda_c = 0;
  StripSolution strip;
  double xi_offset = 0;  // normalized profile is phi(xi + s, t - s/c, y)
  LimitCertificate certificate;
  double tail_slope = 0;
  bool tail_ok = false;
  double right_end = 0;   // max phi at xi = +window edge of the widest strip
  double left_end = 0;    // max 1 - phi at xi = -window edge
  double right_boundary = 0;  // raw boundary values
  double left_boundary = 0;
  std::vector<double> a_schedule;
  std::vector<double> strip_differences;
  SubSuperPair bounds;

  const StripGrid& grid() const { return strip.grid; }
  // raw strip profile, twisted-periodic in t, periodic in y; 1 / 0 outside the strip
  double value(double xi, double t, std::span<const double> y) const;
  double normalized(double xi, double t, std::span<const double> y) const {
    return value(xi + xi_offset, t - xi_offset / c, y);
  }
  // mean over one (t, y) cell at fixed xi (grid nodes of the strip)
  double cell_mean(double xi) const;
  double cell_max(double xi) const;
  double cell_min(double xi) const;
};

// shift s with max_{t,y} phi(s, t, y) = target
double translation_for_level(const FrontProfile& p, double target = 0.5);
// sup over the nodes of a with |xi| <= half_window of the normalized profiles
double profile_distance(const FrontProfile& a, const FrontProfile& b, double half_window);
// same for the (t, y) cell means, usable across different frames
double mean_profile_distance(const FrontProfile& a, const FrontProfile& b, double half_window);
LimitCertificate limit_certificate(const FrontProfile& p, double alpha);
double right_tail_slope(const FrontProfile& p, double lo, double hi);

FrontProfile make_profile(const MediumSpec& spec, const RationalDirection& zeta, StripSolution strip,
                          const StripTolerances& tols);

FrontProfile front_from_strips(const MediumSpec& spec, const RationalDirection& zeta, double c,
                               std::span<const double> a_schedule, const StripResolution& res,
                               const StripTolerances& tols);

FrontProfile near_critical_front(const MediumSpec& spec, const RationalDirection& zeta, double eps_rel,
                                 std::span<const double> a_schedule, const StripResolution& res,
                                 const StripTolerances& tols);

struct DirectionSequence {
  std::vector<double> e;
  std::vector<double> angle_tols;
  std::vector<RationalDirection> zetas;
  std::vector<double> angles;
  std::vector<double> c_stars;
  std::vector<FrontProfile> fronts;
  std::vector<double> profile_differences;  // consecutive, after normalization
};

// rationalization and speeds only
DirectionSequence direction_speed_sequence(const MediumSpec& spec, std::span<const double> e,
                                           std::span<const double> angle_tols, const TorusGrid& grid,
                                           double tol = 1e-8, long max_denominator = 1000000);

DirectionSequence front_any_direction(const MediumSpec& spec, std::span<const double> e,
                                      std::span<const double> angle_tols, double c_offset,
                                      std::span<const double> a_schedule, const StripResolution& res,
                                      const StripTolerances& tols, long max_denominator = 1000000);

}  // namespace kppfront
