#include "kppfront/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kppfront/errors.hpp"

namespace kppfront {

void frame_coordinates(const FrameMatrix& R, double c, double t, std::span<const double> x, double& xi,
                       std::span<double> y) {
  const std::size_t n = R.dimension;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += R.R(static_cast<Eigen::Index>(i), 0) * x[i];
  xi = s - c * t;
  for (std::size_t j = 1; j < n; ++j) {
    double v = 0;
    for (std::size_t i = 0; i < n; ++i) v += R.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[i];
    y[j - 1] = v;
  }
}

void physical_point(const FrameMatrix& R, double c, double xi, double t, std::span<const double> y,
                    std::span<double> x) {
  const std::size_t n = R.dimension;
  const double s = xi + c * t;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double v = R.R(ii, 0) * s;
    for (std::size_t j = 1; j < n; ++j) v += R.R(ii, static_cast<Eigen::Index>(j)) * y[j - 1];
    x[i] = v;
  }
}

double PhysicalSolution::operator()(double t, std::span<const double> x) const {
  const FrontProfile& p = *p_;
  const std::size_t n = p.spec.dimension;
  double xi = 0;
  double y[3] = {0, 0, 0};
  frame_coordinates(p.R, p.c, t, x, xi, std::span<double>(y, n - 1));
  return p.value(xi, t, std::span<const double>(y, n - 1));
}

double reconstruct_solution(const FrontProfile& profile, double t, std::span<const double> x) {
  return PhysicalSolution(profile)(t, x);
}

std::vector<double> halton_point(std::size_t index, std::size_t dim) {
  static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (dim > 8) throw InvalidArgument("Halton points support up to 8 dimensions");
  std::vector<double> out(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    double f = 1, r = 0;
    std::size_t i = index;
    while (i > 0) {
      f /= primes[d];
      r += f * static_cast<double>(i % primes[d]);
      i /= primes[d];
    }
    out[d] = r;
  }
  return out;
}

std::vector<std::vector<long>> lattice_box(std::size_t dimension, long radius) {
  std::vector<std::vector<long>> out;
  std::vector<long> k(dimension, -radius);
  while (true) {
    out.push_back(k);
    std::size_t i = 0;
    while (i < dimension && k[i] == radius) k[i++] = -radius;
    if (i == dimension) break;
    ++k[i];
  }
  return out;
}

namespace {

// quasi-random (t, x) with the normalized xi inside the comparison window
template <class F>
void sample_points(const FrontProfile& p, std::size_t count, std::size_t seed, F&& f) {
  const std::size_t n = p.spec.dimension;
  const StripGrid& g = p.grid();
  const double w = std::min(10.0, 0.8 * g.a);
  std::vector<double> y(n > 1 ? n - 1 : 1), x(n);
  for (std::size_t s = 0; s < count; ++s) {
    auto h = halton_point(1 + seed * count + s, n + 1);
    double xi = p.xi_offset + w * (2 * h[0] - 1);
    double t = g.period * h[1];
    for (std::size_t k = 0; k + 1 < n; ++k) y[k] = g.cell[k] * h[k + 2];
    physical_point(p.R, p.c, xi, t, std::span<const double>(y.data(), n - 1), x);
    f(t, std::span<const double>(x));
  }
}

}  // namespace

double pulsating_residual(const FrontProfile& profile, const std::vector<std::vector<long>>& k_set,
                          std::size_t sample_count, std::size_t seed) {
  const std::size_t n = profile.spec.dimension;
  PhysicalSolution u(profile);
  double worst = 0;
  std::vector<double> xs(n);
  sample_points(profile, sample_count, seed, [&](double t, std::span<const double> x) {
    for (const auto& k : k_set) {
      if (k.size() != n) throw InvalidArgument("lattice vector has wrong dimension");
      double ke = 0;
      bool zero = true;
      for (std::size_t i = 0; i < n; ++i) {
        ke += static_cast<double>(k[i]) * profile.e[i];
        xs[i] = x[i] - static_cast<double>(k[i]);
        zero = zero && k[i] == 0;
      }
      if (zero) continue;
      worst = std::max(worst, std::fabs(u(t + ke / profile.c, x) - u(t, xs)));
    }
  });
  return worst;
}

namespace {

// Grid access with time levels wrapped through the twist.
struct LevelAccess {
  const StripGrid& g;
  const std::vector<double>& v;
  std::vector<long> ny, stride;

  explicit LevelAccess(const StripSolution& S) : g(S.grid), v(S.values) {
    long s = 1;
    for (auto n : g.n_y) {
      ny.push_back(static_cast<long>(n));
      stride.push_back(s);
      s *= static_cast<long>(n);
    }
  }

  // iy given per axis; level any integer
  double operator()(long level, long j, const long* iy) const {
    const long nt = static_cast<long>(g.n_t);
    long m = level >= 0 ? level / nt : -((-level + nt - 1) / nt);
    long l = level - m * nt;
    long flat = 0;
    for (std::size_t k = 0; k < ny.size(); ++k) {
      long i = (iy[k] - m * g.twist[k]) % ny[k];
      if (i < 0) i += ny[k];
      flat += i * stride[k];
    }
    return v[g.index(static_cast<std::size_t>(l), static_cast<std::size_t>(j), static_cast<std::size_t>(flat))];
  }
};

constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12};

}  // namespace

PdeResidual pde_residual(const FrontProfile& p, double half_window, std::size_t samples, std::size_t seed) {
  const StripSolution& S = p.strip;
  const StripGrid& g = S.grid;
  const std::size_t N = p.spec.dimension, ny = g.y_count(), nx = g.n_xi + 1;
  const MovingCoefficients coeffs(p.spec, p.R, p.c);
  LevelAccess phi(S);
  PdeResidual out;

  auto spacing = [&](std::size_t axis) { return axis == 0 ? g.h_xi : g.h_y[axis - 1]; };
  std::vector<double> At(g.nodes() * N * N);
  std::vector<double> y(N > 1 ? N - 1 : 1), X(N);
  for (std::size_t l = 0; l < g.n_t; ++l) {
    const double t = g.dt * static_cast<double>(l);
    for (std::size_t node = 0; node < g.nodes(); ++node) {
      g.y_at(node / nx, y);
      Eigen::MatrixXd A = coeffs.diffusion(g.xi(node % nx), t, std::span<const double>(y.data(), N - 1));
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
          At[node * N * N + a * N + b] = A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    auto node_of = [&](long j, const long* iy) {
      std::size_t flat = 0, s = 1;
      for (std::size_t k = 0; k + 1 < N; ++k) {
        long n = static_cast<long>(g.n_y[k]);
        long i = ((iy[k] % n) + n) % n;
        flat += static_cast<std::size_t>(i) * s;
        s *= g.n_y[k];
      }
      return flat * nx + static_cast<std::size_t>(j);
    };
    // D_b phi at (j, iy) on this level
    auto grad = [&](long j, const long* iy, std::size_t b) {
      long pos[4] = {j, iy[0], iy[1], 0};
      double s = 0;
      for (int o = -2; o <= 2; ++o) {
        if (o == 0) continue;
        long q[4] = {pos[0], pos[1], pos[2], 0};
        q[b] += o;
        s += kD1[o + 2] * phi(static_cast<long>(l), q[0], q + 1);
      }
      return s / spacing(b);
    };
    for (std::size_t iyf = 0; iyf < ny; ++iyf) {
      long iy[3] = {0, 0, 0};
      {
        std::size_t r = iyf;
        for (std::size_t k = 0; k + 1 < N; ++k) {
          iy[k] = static_cast<long>(r % g.n_y[k]);
          r /= g.n_y[k];
        }
      }
      g.y_at(iyf, y);
      for (std::size_t jj = 4; jj + 4 <= g.n_xi; ++jj) {
        const long j = static_cast<long>(jj);
        const double xi = g.xi(jj);
        if (half_window > 0 && std::fabs(xi - p.xi_offset) > half_window) continue;
        double div = 0;
        for (std::size_t a = 0; a < N; ++a) {
          for (int o = -2; o <= 2; ++o) {
            if (o == 0) continue;
            long q[4] = {j, iy[0], iy[1], 0};
            q[a] += o;
            std::size_t nd = node_of(q[0], q + 1);
            double flux = 0;
            for (std::size_t b = 0; b < N; ++b) {
              double ab = At[nd * N * N + a * N + b];
              if (ab != 0) flux += ab * grad(q[0], q + 1, b);
            }
            div += kD1[o + 2] * flux / spacing(a);
          }
        }
        double dt = 0;
        for (int o = -2; o <= 2; ++o)
          if (o) dt += kD1[o + 2] * phi(static_cast<long>(l) + o, j, iy);
        dt /= g.dt;
        double v = phi(static_cast<long>(l), j, iy);
        double dxi = grad(j, iy, 0);
        coeffs.position(xi, t, std::span<const double>(y.data(), N - 1), X);
        double r = dt - div - p.c * dxi - p.spec.reaction(X, v);
        out.interior = std::max(out.interior, std::fabs(r));
        ++out.nodes;
      }
    }
  }

  // physical form u_t - div(A grad u) - f through the reconstruction; diagnostic
  PhysicalSolution u(p);
  const double eta = 2 * g.h_xi, etat = g.dt;
  std::vector<double> xp(N), xq(N);
  sample_points(p, samples, seed, [&](double t, std::span<const double> x) {
    std::vector<double> xr(x.begin(), x.end());
    auto du = [&](std::span<const double> at, std::size_t b) {
      std::vector<double> a1(at.begin(), at.end()), a2(at.begin(), at.end());
      a1[b] += eta;
      a2[b] -= eta;
      return (u(t, a1) - u(t, a2)) / (2 * eta);
    };
    double div = 0;
    for (std::size_t a = 0; a < N; ++a) {
      for (int sgn : {1, -1}) {
        xp = xr;
        xp[a] += sgn * eta;
        std::vector<double> X0 = xp;
        reduce_torus(X0);
        Eigen::MatrixXd A = p.spec.diffusion_at(X0);
        double flux = 0;
        for (std::size_t b = 0; b < N; ++b)
          flux += A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * du(xp, b);
        div += sgn * flux / (2 * eta);
      }
    }
    double ut = (u(t + etat, xr) - u(t - etat, xr)) / (2 * etat);
    std::vector<double> X0 = xr;
    reduce_torus(X0);
    double r = ut - div - p.spec.reaction(X0, u(t, xr));
    out.profile_eq = std::max(out.profile_eq, std::fabs(r));
  });
  return out;
}

double monotonicity_check(const FrontProfile& profile, std::size_t sample_count, std::size_t seed) {
  PhysicalSolution u(profile);
  const double d = profile.grid().dt;
  double worst = std::numeric_limits<double>::infinity();
  sample_points(profile, sample_count, seed, [&](double t, std::span<const double> x) {
    worst = std::min(worst, (u(t + d, x) - u(t - d, x)) / (2 * d));
  });
  return worst;
}

}  // namespace kppfront
