#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical code; only the public data types are shared.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace oracle {

// Plain exact Gram-Schmidt on zeta and the leading axes, keeping only the
// vectors that survive (nonzero after projection). Returns mutually orthogonal
// rows, the first being zeta itself.
std::vector<std::vector<mpq_class>> gram_schmidt(const std::vector<mpq_class>& zeta);

// Smallest positive t with t * v in Z^N for a rational v, i.e. 1 / gcd of
// the entries times the lcm of the denominators (rational gcd, brute style).
mpq_class brute_rational_gcd(const std::vector<mpq_class>& v);

// Check that k is an integer combination sum p_i g_i beta_i / |beta_i|^2
// by solving the orthogonal system directly: p_i = (k . beta_i) / g_i.
bool brute_decomposition(const std::vector<long>& k, const std::vector<std::vector<mpq_class>>& beta,
                         std::vector<mpq_class>& p);

// Largest real eigenvalue of the 1D periodic operator
//   phi'' - 2 lambda a phi' + (lambda^2 a + r(x)) phi     (a constant)
// by dense central differences on n nodes and a full nonsymmetric solve.
double dense_principal_1d(double a, const std::function<double(double)>& r, double lambda, std::size_t n);

// Same for constant A in N dims, only the symbol is needed: lambda^2 e.A.e + r.
double homogeneous_k(const std::vector<double>& A, const std::vector<double>& e, double lambda, double r);

// Classical Fisher-KPP wave U'' + c U' + U(1-U) = 0 by RK4 shooting from the
// unstable manifold at U = 1. Sampled on a fine grid, aligned so U(0) = 0.5.
class ShootingWave {
public:
  ShootingWave(double c, double h = 1e-3);
  double operator()(double xi) const;

private:
  double x0_ = 0, h_ = 0;
  std::vector<double> u_;
};

// Steady (L + M) v = rhs on a 1D strip with L v = -d v'' - c v', Dirichlet ends,
// central differences; reference for the time-periodic solve with time-constant data.
std::vector<double> steady_strip(double d, double c, double M, double a, std::size_t n,
                                 std::span<const double> rhs, double left, double right);

struct CauchyRun {
  std::vector<double> t;
  std::vector<double> position;  // rightmost x with u >= 0.5
  double slope = 0;              // least squares over the fit window
  double log_corrected = 0;      // fit of x = c t - b log t + d
};

// u_t = u_xx + r(x) u (1 - u) on [0, L], u = 1 on [0, x_init] initially,
// implicit diffusion, explicit reaction.
CauchyRun cauchy_spreading(const std::function<double(double)>& r, double L, double h, double dt, double t_end,
                           double fit_lo, double fit_hi, double x_init = 5);

}  // namespace oracle
