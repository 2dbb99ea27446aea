#include "kppfront/wavespeed.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kppfront/errors.hpp"
#include "kppfront/parallel.hpp"

namespace kppfront {

SpeedResult minimal_speed(DispersionEvaluator& ev, std::span<const double> e, double tol) {
  auto ratio = [&](double l) { return ev.k(l) / l; };
  SpeedResult out;
  out.e.assign(e.begin(), e.end());

  // geometric expansion from lambda = 1 until the middle point is lowest
  double a = 0.5, b = 1.0, c = 2.0;
  double fa = ratio(a), fb = ratio(b), fc = ratio(c);
  while (!(fb <= fa && fb <= fc)) {
    if (fa < fb) {
      c = b, fc = fb;
      b = a, fb = fa;
      a = b / 2, fa = ratio(a);
    } else {
      a = b, fa = fb;
      b = c, fb = fc;
      c = b * 2, fc = ratio(c);
    }
    if (a < 1e-6 || c > 1e6) throw BracketFailure("no interior minimum of k/lambda in [1e-6, 1e6]");
  }
  out.bracket_lo = a;
  out.bracket_hi = c;

  // root of g = lambda k' - k, the first-order condition, by Illinois
  // regula falsi; k' comes from the left eigenvector so the root is not
  // limited by the flatness of k / lambda
  auto g = [&](double l, double& kk) {
    auto [k, dk] = ev.slope(l);
    kk = k;
    return l * dk - k;
  };
  double ka = 0, kc = 0, kx = 0;
  double ga = g(a, ka), gc = g(c, kc);
  double ls = b;
  if (ga < 0 && gc > 0) {
    int side = 0;
    double gx = 0;
    for (int it = 0; it < 200; ++it) {
      ls = (a * gc - c * ga) / (gc - ga);
      gx = g(ls, kx);
      if (gx == 0 || c - a <= std::max(1e-13, 1e-4 * tol) * (1 + ls)) break;
      if ((gx < 0) == (ga < 0)) {
        a = ls, ga = gx;
        if (side == -1) gc /= 2;
        side = -1;
      } else {
        c = ls, gc = gx;
        if (side == 1) ga /= 2;
        side = 1;
      }
      if (std::fabs(gx) <= 1e-14 * std::max(1.0, std::fabs(kx))) break;
    }
    out.first_order_defect = std::fabs(gx);
  } else {
    // not bracketed by the first-order condition: golden section on k / lambda
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
    double f1 = ratio(x1), f2 = ratio(x2);
    const double width = std::max(2e-10, 0.2 * tol);
    while (c - a > width * (1 + b)) {
      if (f1 <= f2) {
        c = x2;
        x2 = x1, f2 = f1;
        x1 = c - gr * (c - a), f1 = ratio(x1);
      } else {
        a = x1;
        x1 = x2, f1 = f2;
        x2 = a + gr * (c - a), f2 = ratio(x2);
      }
    }
    ls = f1 <= f2 ? x1 : x2;
    out.first_order_defect = std::fabs(g(ls, kx));
  }
  out.lambda_star = ls;
  out.c_star = ev.k(ls) / ls;
  out.evaluations = ev.evaluations();
  if (!(out.c_star > 0)) throw BracketFailure("nonpositive minimal speed");
  return out;
}

SpeedResult minimal_speed(const MediumSpec& spec, std::span<const double> e, const TorusGrid& grid, double tol) {
  DispersionEvaluator ev(spec, e, grid, tol / 100);
  return minimal_speed(ev, e, tol);
}

RootResult decay_rates(const MediumSpec& spec, std::span<const double> e, double c, const TorusGrid& grid,
                       double tol) {
  DispersionEvaluator ev(spec, e, grid, tol / 100);
  SpeedResult s = minimal_speed(ev, e, tol);
  RootResult r;
  r.c = c;
  r.c_star = s.c_star;
  r.lambda_star = s.lambda_star;
  if (c < s.c_star - tol) {
    std::ostringstream os;
    os.precision(12);
    os << "k_lambda - c lambda has no root for c = " << c << " < c* = " << s.c_star;
    throw NoRoot(os.str());
  }
  if (std::fabs(c - s.c_star) <= tol) {
    r.double_root = true;
    r.lambda_minus = r.lambda_plus = s.lambda_star;
    r.residual_minus = r.residual_plus = std::fabs(ev.k(s.lambda_star) - c * s.lambda_star);
    return r;
  }
  auto F = [&](double l) { return ev.k(l) - c * l; };
  auto bisect = [&](double lo, double hi, bool increasing) {
    double fm = 0, mid = 0;
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      fm = F(mid);
      if ((fm > 0) == increasing) hi = mid;
      else lo = mid;
      if (hi - lo <= 1e-12 * std::max(1.0, mid)) break;
    }
    return std::make_pair(0.5 * (lo + hi), fm);
  };
  // F > 0 at 0, F < 0 at lambda*, F > 0 far right
  auto [lm, fm] = bisect(0.0, s.lambda_star, false);
  double hi = 2 * s.lambda_star;
  while (F(hi) <= 0) {
    hi *= 2;
    if (hi > 1e6) throw BracketFailure("no upper decay rate below 1e6");
  }
  auto [lp, fp] = bisect(s.lambda_star, hi, true);
  r.lambda_minus = lm;
  r.lambda_plus = lp;
  r.residual_minus = std::fabs(F(lm));
  r.residual_plus = std::fabs(F(lp));
  (void)fm;
  (void)fp;
  return r;
}

SweepTable speed_sweep(const MediumSpec& spec, std::size_t direction_count, const TorusGrid& grid, double tol,
                       std::size_t threads) {
  if (direction_count < 8) throw InvalidArgument("direction_count must be >= 8");
  const std::size_t n = spec.dimension;
  SweepTable table;
  table.dimension = n;
  const double pi = std::numbers::pi;
  if (n == 2) {
    table.rows = 1;
    table.cols = direction_count;
    for (std::size_t i = 0; i < direction_count; ++i) {
      double th = 2 * pi * static_cast<double>(i) / static_cast<double>(direction_count);
      table.entries.push_back({{th}, {std::cos(th), std::sin(th)}, 0, 0, false, {}});
    }
  } else if (n == 3) {
    table.rows = std::max<std::size_t>(2, direction_count / 2);
    table.cols = direction_count;
    for (std::size_t r = 0; r < table.rows; ++r) {
      double pol = pi * (static_cast<double>(r) + 0.5) / static_cast<double>(table.rows);
      for (std::size_t c = 0; c < table.cols; ++c) {
        double az = 2 * pi * static_cast<double>(c) / static_cast<double>(table.cols);
        table.entries.push_back({{pol, az},
                                 {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)},
                                 0, 0, false, {}});
      }
    }
  } else {
    throw InvalidArgument("speed_sweep supports N = 2 or N = 3");
  }

  parallel_for(table.entries.size(), threads, [&](std::size_t i) {
    auto& en = table.entries[i];
    try {
      auto s = minimal_speed(spec, en.e, grid, tol);
      en.c_star = s.c_star;
      en.lambda_star = s.lambda_star;
      en.ok = true;
    } catch (const Error& ex) {
      en.error = ex.what();
    }
  });

  auto jump = [&](std::size_t a, std::size_t b) {
    const auto &x = table.entries[a], &y = table.entries[b];
    if (x.ok && y.ok) table.max_adjacent_jump = std::max(table.max_adjacent_jump, std::fabs(x.c_star - y.c_star));
  };
  for (std::size_t r = 0; r < table.rows; ++r)
    for (std::size_t c = 0; c < table.cols; ++c) {
      std::size_t i = r * table.cols + c;
      jump(i, r * table.cols + (c + 1) % table.cols);
      if (r + 1 < table.rows) jump(i, i + table.cols);
    }
  return table;
}

}  // namespace kppfront
