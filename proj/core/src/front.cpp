#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kppfront/errors.hpp"
#include "kppfront/front.hpp"
#include "kppfront/parallel.hpp"

namespace kppfront {

namespace {

// cubic Lagrange weights for nodes -1, 0, 1, 2 at offset s from node 0
void cubic_weights(double s, double w[4]) {
  w[0] = -s * (s - 1) * (s - 2) / 6;
  w[1] = (s + 1) * (s - 1) * (s - 2) / 2;
  w[2] = -(s + 1) * s * (s - 2) / 2;
  w[3] = (s + 1) * s * (s - 1) / 6;
}

// stencil start and weights along xi; one-sided near the ends
std::size_t xi_stencil(const StripGrid& g, double xi, double w[4]) {
  double u = std::clamp((xi + g.a) / g.h_xi, 0.0, static_cast<double>(g.n_xi));
  if (g.n_xi < 3) {
    std::size_t j0 = std::min<std::size_t>(static_cast<std::size_t>(u), g.n_xi - 1);
    w[0] = w[3] = 0;
    w[2] = u - static_cast<double>(j0);
    w[1] = 1 - w[2];
    return j0 - 1;  // wraps; only slots 1, 2 are read
  }
  std::size_t j0 = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(u)), 1, g.n_xi - 2);
  cubic_weights(u - static_cast<double>(j0), w);
  return j0 - 1;
}

// tensor cubic: xi one-sided at the strip ends, y periodic, t periodic through the twist
double grid_value(const StripSolution& S, double xi, double t, std::span<const double> y) {
  const StripGrid& g = S.grid;
  double wx[4];
  const std::size_t jx = xi_stencil(g, xi, wx);

  // time wraps: phi(xi, tau + m T, y) = phi(xi, tau, y - m s)
  double m = std::floor(t / g.period);
  double u = (t - m * g.period) / g.dt;
  long l0 = std::min<long>(static_cast<long>(std::floor(u)), static_cast<long>(g.n_t) - 1);
  double wt[4];
  if (g.n_t >= 4) {
    cubic_weights(u - static_cast<double>(l0), wt);
  } else {
    wt[0] = wt[3] = 0;
    wt[2] = std::clamp(u - static_cast<double>(l0), 0.0, 1.0);
    wt[1] = 1 - wt[2];
  }

  const std::size_t ny = g.n_y.size();
  long ybase[3] = {0, 0, 0};
  double wy[3][4] = {};
  for (std::size_t k = 0; k < ny; ++k) {
    double v = (y[k] - m * g.twist_length[k]) / g.h_y[k];
    double f = std::floor(v);
    ybase[k] = static_cast<long>(f) - 1;
    if (g.n_y[k] >= 4) {
      cubic_weights(v - f, wy[k]);
    } else {
      wy[k][0] = wy[k][3] = 0;
      wy[k][2] = v - f;
      wy[k][1] = 1 - wy[k][2];
    }
  }

  const long nt = static_cast<long>(g.n_t);
  double out = 0;
  std::size_t combos = 1;
  for (std::size_t k = 0; k < ny; ++k) combos *= 4;
  for (int a = 0; a < 4; ++a) {
    if (wt[a] == 0) continue;
    long L = l0 - 1 + a;
    long wrap = L >= 0 ? L / nt : -((-L + nt - 1) / nt);
    std::size_t level = static_cast<std::size_t>(L - wrap * nt);
    for (std::size_t c = 0; c < combos; ++c) {
      double w = wt[a];
      std::size_t iy = 0, stride = 1, bits = c;
      for (std::size_t k = 0; k < ny; ++k) {
        int b = static_cast<int>(bits % 4);
        bits /= 4;
        w *= wy[k][b];
        long n = static_cast<long>(g.n_y[k]);
        long idx = (ybase[k] + b - wrap * g.twist[k]) % n;
        if (idx < 0) idx += n;
        iy += static_cast<std::size_t>(idx) * stride;
        stride *= g.n_y[k];
      }
      if (w == 0) continue;
      double acc = 0;
      for (int b = 0; b < 4; ++b)
        if (wx[b] != 0) acc += wx[b] * S.values[g.index(level, jx + static_cast<std::size_t>(b), iy)];
      out += w * acc;
    }
  }
  return out;
}

template <class Reduce>
double cell_reduce(const StripSolution& S, double xi, double init, Reduce red) {
  const StripGrid& g = S.grid;
  double w[4];
  const std::size_t jx = xi_stencil(g, xi, w);
  double acc = init;
  const std::size_t ny = g.y_count();
  for (std::size_t l = 0; l < g.n_t; ++l)
    for (std::size_t iy = 0; iy < ny; ++iy) {
      double v = 0;
      for (int b = 0; b < 4; ++b)
        if (w[b] != 0) v += w[b] * S.values[g.index(l, jx + static_cast<std::size_t>(b), iy)];
      acc = red(acc, v);
    }
  return acc;
}

}  // namespace

double FrontProfile::value(double xi, double t, std::span<const double> y) const {
  const StripGrid& g = strip.grid;
  if (xi < -g.a) return 1.0;
  if (xi > g.a) return 0.0;
  return grid_value(strip, xi, t, y);
}

double FrontProfile::cell_mean(double xi) const {
  const double n = static_cast<double>(strip.grid.n_t * strip.grid.y_count());
  return cell_reduce(strip, xi, 0.0, [](double a, double v) { return a + v; }) / n;
}

double FrontProfile::cell_max(double xi) const {
  return cell_reduce(strip, xi, -std::numeric_limits<double>::infinity(),
                     [](double a, double v) { return std::max(a, v); });
}

double FrontProfile::cell_min(double xi) const {
  return cell_reduce(strip, xi, std::numeric_limits<double>::infinity(),
                     [](double a, double v) { return std::min(a, v); });
}

double translation_for_level(const FrontProfile& p, double target) {
  double lo = -p.grid().a, hi = p.grid().a;
  if (!(p.cell_max(lo) >= target && p.cell_max(hi) <= target))
    throw NoConvergence("profile does not cross the normalization level inside the strip");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1 + p.grid().a); ++it) {
    double mid = 0.5 * (lo + hi);
    if (p.cell_max(mid) >= target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double profile_distance(const FrontProfile& a, const FrontProfile& b, double half_window) {
  const StripGrid& g = a.grid();
  const std::size_t ny = g.y_count(), N = a.spec.dimension;
  std::vector<double> y(N > 1 ? N - 1 : 1, 0.0);
  std::span<double> ys(y.data(), N - 1);
  double d = 0;
  for (std::size_t j = 0; j <= g.n_xi; ++j) {
    double xi = g.xi(j) - a.xi_offset;  // normalized coordinate of node j
    if (std::fabs(xi) > half_window) continue;
    for (std::size_t l = 0; l < g.n_t; ++l) {
      double t = g.dt * static_cast<double>(l) + a.xi_offset / a.c;  // t - s/c hits level l
      for (std::size_t iy = 0; iy < ny; ++iy) {
        g.y_at(iy, ys);
        double va = a.strip.values[g.index(l, j, iy)];
        double vb = b.normalized(xi, t, ys);
        d = std::max(d, std::fabs(va - vb));
      }
    }
  }
  return d;
}

double mean_profile_distance(const FrontProfile& a, const FrontProfile& b, double half_window) {
  const StripGrid& g = a.grid();
  double d = 0;
  for (std::size_t j = 0; j <= g.n_xi; ++j) {
    double xi = g.xi(j) - a.xi_offset;
    if (std::fabs(xi) > half_window) continue;
    d = std::max(d, std::fabs(a.cell_mean(xi + a.xi_offset) - b.cell_mean(xi + b.xi_offset)));
  }
  return d;
}

LimitCertificate limit_certificate(const FrontProfile& p, double alpha) {
  LimitCertificate C;
  C.alpha = alpha;
  C.h0 = reaction_h0(p.spec, alpha);
  if (!(C.h0 > 0)) throw InvalidArgument("h0 must be positive for the left-tail certificate");
  C.mu = 0.5 * (-p.c + std::sqrt(p.c * p.c + 4 * C.h0));
  const StripGrid& g = p.grid();
  // K': phi >= alpha on every node left of -K'
  std::size_t last = 0;
  while (last < g.n_xi && p.cell_min(g.xi(last + 1)) >= alpha) ++last;
  C.K_prime = -g.xi(last);
  C.C0 = std::exp(C.mu * C.K_prime);
  C.holds = true;
  for (std::size_t j = 0; j <= last; ++j) {
    double xi = g.xi(j);
    double gap = 1 - p.cell_min(xi);
    double bound = C.C0 * std::exp(C.mu * xi);
    C.max_tail_ratio = std::max(C.max_tail_ratio, gap / bound);
    ++C.samples;
    if (gap > bound * (1 + 1e-12) + 1e-14) C.holds = false;
  }
  return C;
}

double right_tail_slope(const FrontProfile& p, double lo, double hi) {
  const StripGrid& g = p.grid();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t j = 0; j <= g.n_xi; ++j) {
    double xi = g.xi(j);
    double xn = xi - p.xi_offset;
    if (xn < lo || xn > hi) continue;
    double m = p.cell_mean(xi);
    if (!(m > 0)) continue;
    double v = std::log(m);
    sx += xn, sy += v, sxx += xn * xn, sxy += xn * v;
    ++n;
  }
  if (n < 3) throw DomainTooSmall("right-tail window is not covered by the strip", 0, 0);
  double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

FrontProfile make_profile(const MediumSpec& spec, const RationalDirection& zeta, StripSolution strip,
                          const StripTolerances& tols) {
  FrontProfile P;
  P.spec = spec;
  P.zeta = zeta;
  P.frame = orthogonal_basis(zeta);
  P.lattice = lattice_periods(P.frame);
  P.e = zeta.to_double();
  P.R = moving_frame(P.e, P.frame);
  P.c = strip.c;
  P.c_star = strip.bounds.c_star;
  P.lambda_c = strip.bounds.lambda_c;
  P.bounds = strip.bounds;
  P.strip = std::move(strip);

  const StripGrid& g = P.grid();
  P.xi_offset = translation_for_level(P, 0.5);
  P.certificate = limit_certificate(P, tols.alpha_low);
  double hi = std::min(tols.tail_hi, tols.window_fraction * g.a - P.xi_offset);
  P.tail_slope = right_tail_slope(P, tols.tail_lo, hi);
  P.tail_ok = std::fabs(P.tail_slope + P.lambda_c) <= 0.1 * P.lambda_c;
  P.right_end = P.cell_max(tols.window_fraction * g.a);
  P.left_end = 1 - P.cell_min(-tols.window_fraction * g.a);
  for (double v : P.strip.bc.right) P.right_boundary = std::max(P.right_boundary, v);
  for (double v : P.strip.bc.left) P.left_boundary = std::max(P.left_boundary, 1 - v);
  return P;
}

FrontProfile front_from_strips(const MediumSpec& spec, const RationalDirection& zeta, double c,
                               std::span<const double> a_schedule, const StripResolution& res,
                               const StripTolerances& tols) {
  if (a_schedule.size() < 2) throw InvalidArgument("a_schedule needs at least two entries");
  for (std::size_t i = 1; i < a_schedule.size(); ++i)
    if (!(a_schedule[i] > a_schedule[i - 1])) throw InvalidArgument("a_schedule must be increasing");

  // same spacing on every strip: n_xi refers to the widest one
  const double h = 2 * a_schedule.back() / static_cast<double>(res.n_xi);
  std::vector<StripSolution> strips(a_schedule.size());
  parallel_for(a_schedule.size(), tols.threads, [&](std::size_t i) {
    StripResolution r = res;
    r.n_xi = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(2 * a_schedule[i] / h)));
    strips[i] = solve_strip(spec, zeta, c, a_schedule[i], r, tols);
  });

  std::vector<FrontProfile> profiles;
  for (auto& s : strips) profiles.push_back(make_profile(spec, zeta, std::move(s), tols));
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < profiles.size(); ++i)
    diffs.push_back(profile_distance(profiles[i], profiles[i + 1], tols.window_fraction * profiles[i].grid().a));

  FrontProfile out = std::move(profiles.back());
  out.a_schedule.assign(a_schedule.begin(), a_schedule.end());
  out.strip_differences = diffs;
  if (out.right_end > tols.eps_right || out.left_end > tols.eps_left || diffs.back() > tols.tol_limit) {
    std::ostringstream os;
    os << "strip sequence not accepted: phi(a) = " << out.right_end << ", 1 - phi(-a) = " << out.left_end
       << ", last strip difference = " << diffs.back();
    throw DomainTooSmall(os.str(), out.right_end, out.left_end);
  }
  return out;
}

FrontProfile near_critical_front(const MediumSpec& spec, const RationalDirection& zeta, double eps_rel,
                                 std::span<const double> a_schedule, const StripResolution& res,
                                 const StripTolerances& tols) {
  if (!(eps_rel > 0 && eps_rel <= 0.2)) throw InvalidArgument("eps_rel must lie in (0, 0.2]");
  auto e = zeta.to_double();
  SpeedResult s = minimal_speed(spec, e, res.torus, tols.speed_tol);
  return front_from_strips(spec, zeta, (1 + eps_rel) * s.c_star, a_schedule, res, tols);
}

DirectionSequence direction_speed_sequence(const MediumSpec& spec, std::span<const double> e,
                                           std::span<const double> angle_tols, const TorusGrid& grid, double tol,
                                           long max_denominator) {
  if (e.size() < 2) throw InvalidArgument("direction sequences need N >= 2");
  DirectionSequence D;
  D.e.assign(e.begin(), e.end());
  D.angle_tols.assign(angle_tols.begin(), angle_tols.end());
  for (double at : angle_tols) {
    RationalDirection z = rationalize_direction(e, at, max_denominator);
    D.zetas.push_back(z);
    D.angles.push_back(angle_between(z, e));
    D.c_stars.push_back(minimal_speed(spec, z.to_double(), grid, tol).c_star);
  }
  return D;
}

DirectionSequence front_any_direction(const MediumSpec& spec, std::span<const double> e,
                                      std::span<const double> angle_tols, double c_offset,
                                      std::span<const double> a_schedule, const StripResolution& res,
                                      const StripTolerances& tols, long max_denominator) {
  if (!(c_offset > 0)) throw InvalidArgument("c_offset must be positive");
  DirectionSequence D = direction_speed_sequence(spec, e, angle_tols, res.torus, tols.speed_tol, max_denominator);
  for (std::size_t i = 0; i < D.zetas.size(); ++i)
    D.fronts.push_back(front_from_strips(spec, D.zetas[i], D.c_stars[i] + c_offset, a_schedule, res, tols));
  // frames differ between entries, so compare cell-averaged profiles
  for (std::size_t i = 0; i + 1 < D.fronts.size(); ++i)
    D.profile_differences.push_back(
        mean_profile_distance(D.fronts[i], D.fronts[i + 1], tols.window_fraction * D.fronts[i].grid().a));
  return D;
}

}  // namespace kppfront
