#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

namespace {

mpq_class qdot(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  mpq_class s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// tridiagonal solve, sub/main/super given per row
std::vector<double> thomas(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                           std::vector<double> b) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    b[i] -= m * b[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (b[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

}  // namespace

std::vector<std::vector<mpq_class>> gram_schmidt(const std::vector<mpq_class>& zeta) {
  const std::size_t n = zeta.size();
  std::vector<std::vector<mpq_class>> out{zeta};
  for (std::size_t axis = 0; axis < n && out.size() < n; ++axis) {
    std::vector<mpq_class> v(n, 0);
    v[axis] = 1;
    for (const auto& u : out) {
      mpq_class f = qdot(v, u) / qdot(u, u);
      for (std::size_t j = 0; j < n; ++j) v[j] -= f * u[j];
    }
    bool zero = std::all_of(v.begin(), v.end(), [](const mpq_class& q) { return q == 0; });
    if (!zero) out.push_back(std::move(v));
  }
  return out;
}

mpq_class brute_rational_gcd(const std::vector<mpq_class>& v) {
  // scale to integers by the lcm of denominators, take the integer gcd
  mpz_class L = 1;
  for (const auto& q : v) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.get_den_mpz_t());
  mpz_class g = 0;
  for (const auto& q : v) {
    mpz_class z = q.get_num() * (L / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
  }
  mpq_class r(g, L);
  r.canonicalize();
  return r;
}

bool brute_decomposition(const std::vector<long>& k, const std::vector<std::vector<mpq_class>>& beta,
                         std::vector<mpq_class>& p) {
  const std::size_t n = k.size();
  std::vector<mpq_class> kq(k.begin(), k.end());
  std::vector<mpq_class> sum(n, 0);
  p.clear();
  bool integral = true;
  for (const auto& b : beta) {
    mpq_class g = brute_rational_gcd(b);
    mpq_class c = qdot(kq, b) / g;
    if (c.get_den() != 1) integral = false;
    p.push_back(c);
    mpq_class w = c * g / qdot(b, b);
    for (std::size_t j = 0; j < n; ++j) sum[j] += w * b[j];
  }
  return integral && sum == kq;
}

double dense_principal_1d(double a, const std::function<double(double)>& r, double lambda, std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  for (std::size_t i = 0; i < n; ++i) {
    long ii = static_cast<long>(i), ip = static_cast<long>((i + 1) % n), im = static_cast<long>((i + n - 1) % n);
    L(ii, ip) += a / (h * h) - lambda * a / h;
    L(ii, im) += a / (h * h) + lambda * a / h;
    L(ii, ii) += -2 * a / (h * h) + lambda * lambda * a + r(static_cast<double>(i) * h);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(L, false);
  double best = -1e300;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (std::fabs(es.eigenvalues()[i].imag()) < 1e-9) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

double homogeneous_k(const std::vector<double>& A, const std::vector<double>& e, double lambda, double r) {
  const std::size_t n = e.size();
  double q = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q += e[i] * A[i * n + j] * e[j];
  return lambda * lambda * q + r;
}

ShootingWave::ShootingWave(double c, double h) : h_(h) {
  const double nu = (-c + std::sqrt(c * c + 4)) / 2;
  const double eps = 1e-9;
  // state (U, U'); start on the unstable manifold of (1, 0)
  double U = 1 - eps, V = -eps * nu;
  auto rhs = [c](double u, double v, double& du, double& dv) {
    du = v;
    dv = -c * v - u * (1 - u);
  };
  std::vector<double> us{U};
  while (U > 1e-14 && us.size() < 20000000) {
    double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    rhs(U, V, k1u, k1v);
    rhs(U + 0.5 * h * k1u, V + 0.5 * h * k1v, k2u, k2v);
    rhs(U + 0.5 * h * k2u, V + 0.5 * h * k2v, k3u, k3v);
    rhs(U + h * k3u, V + h * k3v, k4u, k4v);
    U += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    V += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    us.push_back(U);
  }
  // first crossing of one half sets xi = 0
  std::size_t i = 1;
  while (i < us.size() && us[i] > 0.5) ++i;
  if (i == us.size()) throw std::runtime_error("shooting never crossed 0.5");
  double frac = (us[i - 1] - 0.5) / (us[i - 1] - us[i]);
  x0_ = -(static_cast<double>(i - 1) + frac) * h;
  u_ = std::move(us);
}

double ShootingWave::operator()(double xi) const {
  double s = (xi - x0_) / h_;
  if (s <= 0) return 1.0;  // beyond the start the wave is within eps of 1
  std::size_t i = static_cast<std::size_t>(s);
  if (i + 3 >= u_.size()) return 0.0;
  // cubic Lagrange through i-1..i+2
  double t = s - static_cast<double>(i);
  if (i == 0) return u_[0] + t * (u_[1] - u_[0]);
  double p0 = u_[i - 1], p1 = u_[i], p2 = u_[i + 1], p3 = u_[i + 2];
  return p0 * (-t * (t - 1) * (t - 2) / 6) + p1 * ((t + 1) * (t - 1) * (t - 2) / 2) +
         p2 * (-(t + 1) * t * (t - 2) / 2) + p3 * ((t + 1) * t * (t - 1) / 6);
}

std::vector<double> steady_strip(double d, double c, double M, double a, std::size_t n,
                                 std::span<const double> rhs, double left, double right) {
  const double h = 2 * a / static_cast<double>(n);
  std::vector<double> lo(n + 1, 0), di(n + 1, 1), up(n + 1, 0), b(rhs.begin(), rhs.end());
  for (std::size_t j = 1; j < n; ++j) {
    lo[j] = -d / (h * h) + c / (2 * h);
    up[j] = -d / (h * h) - c / (2 * h);
    di[j] = 2 * d / (h * h) + M;
  }
  b[0] = left;
  b[n] = right;
  return thomas(lo, di, up, b);
}

CauchyRun cauchy_spreading(const std::function<double(double)>& r, double L, double h, double dt, double t_end,
                           double fit_lo, double fit_hi, double x_init) {
  const std::size_t n = static_cast<std::size_t>(std::lround(L / h));
  std::vector<double> u(n + 1, 0.0), rx(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    double x = static_cast<double>(j) * h;
    rx[j] = r(x);
    if (x <= x_init) u[j] = 1;
  }
  // Neumann at x = 0 (reflection), u = 0 at x = L
  const double s = dt / (h * h);
  std::vector<double> lo(n + 1, -s), di(n + 1, 1 + 2 * s), up(n + 1, -s), b(n + 1);
  up[0] = -2 * s;
  lo[n] = 0;
  di[n] = 1;
  lo[0] = 0;
  CauchyRun run;
  const std::size_t steps = static_cast<std::size_t>(std::lround(t_end / dt));
  const std::size_t every = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 / dt)));
  for (std::size_t m = 1; m <= steps; ++m) {
    for (std::size_t j = 0; j <= n; ++j) b[j] = u[j] + dt * rx[j] * u[j] * (1 - u[j]);
    b[n] = 0;
    u = thomas(lo, di, up, b);
    if (m % every == 0) {
      std::size_t j = n;
      while (j > 0 && u[j] < 0.5) --j;
      double x = static_cast<double>(j) * h;
      if (j < n) x += h * (u[j] - 0.5) / (u[j] - u[j + 1]);
      if (x > L - 10) throw std::runtime_error("Cauchy domain too short");
      run.t.push_back(static_cast<double>(m) * dt);
      run.position.push_back(x);
    }
  }
  // plain least-squares slope, then x = c t - b log t + d
  Eigen::MatrixXd A1, A2;
  Eigen::VectorXd y;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < run.t.size(); ++i)
    if (run.t[i] >= fit_lo && run.t[i] <= fit_hi) idx.push_back(i);
  const long m = static_cast<long>(idx.size());
  A1.resize(m, 2);
  A2.resize(m, 3);
  y.resize(m);
  for (long i = 0; i < m; ++i) {
    double t = run.t[idx[static_cast<std::size_t>(i)]];
    A1(i, 0) = t;
    A1(i, 1) = 1;
    A2(i, 0) = t;
    A2(i, 1) = std::log(t);
    A2(i, 2) = 1;
    y(i) = run.position[idx[static_cast<std::size_t>(i)]];
  }
  run.slope = A1.colPivHouseholderQr().solve(y)(0);
  run.log_corrected = A2.colPivHouseholderQr().solve(y)(0);
  return run;
}

}  // namespace oracle
