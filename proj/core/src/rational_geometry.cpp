#include "kppfront/rational_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "kppfront/errors.hpp"

namespace kppfront {

std::string to_string(const Rational& q) { return q.get_str(); }

RationalDirection::RationalDirection(std::vector<Rational> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw InvalidArgument("direction must have at least one coordinate");
  Rational s = 0;
  for (auto& c : coords_) {
    c.canonicalize();
    s += c * c;
  }
  if (s != 1) throw InvalidArgument("rational direction is not a unit vector: |zeta|^2 = " + to_string(s));
}

RationalDirection RationalDirection::axis(std::size_t dimension, std::size_t index, int sign) {
  std::vector<Rational> c(dimension, Rational(0));
  c.at(index) = sign < 0 ? -1 : 1;
  return RationalDirection(std::move(c));
}

std::vector<double> RationalDirection::to_double() const {
  std::vector<double> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) out[i] = coords_[i].get_d();
  return out;
}

Integer RationalDirection::max_denominator() const {
  Integer m = 1;
  for (const auto& c : coords_)
    if (c.get_den() > m) m = c.get_den();
  return m;
}

double Surd::value() const { return coefficient.get_d() * std::sqrt(radicand.get_d()); }

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// gcd of rationals: gcd of numerators over lcm of denominators
Rational rational_gcd(std::span<const Rational> values) {
  Integer num = 0, den = 1;
  for (const auto& v : values) {
    if (v == 0) continue;
    Integer l;
    mpz_lcm(l.get_mpz_t(), den.get_mpz_t(), v.get_den().get_mpz_t());
    den = l;
  }
  for (const auto& v : values) {
    if (v == 0) continue;
    Integer scaled = abs(v.get_num()) * (den / v.get_den());
    Integer g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), scaled.get_mpz_t());
    num = g;
  }
  Rational out(num, den);
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// rationalization

namespace {

struct Convergent {
  long p;
  long q;
};

std::vector<Convergent> convergents(double x, long max_den) {
  std::vector<Convergent> out;
  long double r = x;
  long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  for (int it = 0; it < 64; ++it) {
    long double a = std::floor(r);
    if (std::fabs(a) > 1e15L) break;
    long ai = static_cast<long>(a);
    long double hn = static_cast<long double>(ai) * h1 + h2;
    long double kn = static_cast<long double>(ai) * k1 + k2;
    if (kn > static_cast<long double>(max_den) || std::fabs(hn) > 9e18L) break;
    long h = static_cast<long>(hn), k = static_cast<long>(kn);
    out.push_back({h, k});
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    long double frac = r - a;
    if (frac < 1e-17L || std::fabs(static_cast<long double>(x) - static_cast<long double>(h) / k) <
                             1e-17L * (1 + std::fabs(static_cast<long double>(x))))
      break;
    r = 1.0L / frac;
  }
  return out;
}

void check_unit(std::span<const double> e) {
  if (e.empty()) throw InvalidArgument("empty direction");
  double s = 0;
  for (double v : e) s += v * v;
  if (std::fabs(std::sqrt(s) - 1.0) > 1e-12) throw InvalidArgument("direction is not a unit vector");
}

std::size_t pole_index(std::span<const double> e) {
  std::size_t j = 0;
  for (std::size_t i = 1; i < e.size(); ++i)
    if (std::fabs(e[i]) > std::fabs(e[j])) j = i;
  return j;
}

// inverse stereographic map from the pole -sign*e_j
RationalDirection lift(std::size_t n, std::size_t j, int sign, const std::vector<Rational>& w) {
  Rational W = 0;
  for (const auto& v : w) W += v * v;
  std::vector<Rational> x(n);
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == j) {
      x[i] = sign * (1 - W) / (1 + W);
    } else {
      x[i] = 2 * w[m++] / (1 + W);
    }
  }
  return RationalDirection(std::move(x));
}

struct Projection {
  std::size_t pole;
  int sign;
  std::vector<std::vector<Convergent>> conv;
};

Projection project(std::span<const double> e, long max_den) {
  Projection pr;
  pr.pole = pole_index(e);
  pr.sign = e[pr.pole] < 0 ? -1 : 1;
  const double denom = 1.0 + std::fabs(e[pr.pole]);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i == pr.pole) continue;
    auto c = convergents(e[i] / denom, max_den);
    if (c.empty()) throw ToleranceUnreachable("max_denominator too small for any convergent");
    pr.conv.push_back(std::move(c));
  }
  return pr;
}

RationalDirection at_level(std::size_t n, const Projection& pr, long level) {
  std::vector<Rational> w;
  for (const auto& c : pr.conv) {
    const Convergent* best = &c.front();
    for (const auto& cv : c)
      if (cv.q <= level) best = &cv;
    w.emplace_back(Rational(best->p, best->q));
    w.back().canonicalize();
  }
  return lift(n, pr.pole, pr.sign, w);
}

}  // namespace

double angle_between(const RationalDirection& zeta, std::span<const double> e) {
  double d2 = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double d = zeta[i].get_d() - e[i];
    d2 += d * d;
  }
  return 2.0 * std::asin(std::min(1.0, std::sqrt(d2) / 2.0));
}

RationalDirection rationalize_direction(std::span<const double> e, double angle_tol,
                                        long max_denominator) {
  check_unit(e);
  if (!(angle_tol > 0)) throw InvalidArgument("angle_tol must be positive");
  if (max_denominator < 1) throw InvalidArgument("max_denominator must be >= 1");
  const std::size_t n = e.size();
  if (n == 1) return RationalDirection::axis(1, 0, e[0] < 0 ? -1 : 1);

  Projection pr = project(e, max_denominator);
  std::set<long> levels;
  for (const auto& c : pr.conv)
    for (const auto& cv : c) levels.insert(cv.q);

  double best = 4.0;
  for (long level : levels) {
    RationalDirection z = at_level(n, pr, level);
    double ang = angle_between(z, e);
    best = std::min(best, ang);
    if (ang <= angle_tol) return z;
  }
  std::ostringstream os;
  os << "no rational direction with denominators <= " << max_denominator << " within " << angle_tol
     << " rad (best " << best << ")";
  throw ToleranceUnreachable(os.str());
}

RationalDirection closest_rational_direction(std::span<const double> e, long max_denominator) {
  check_unit(e);
  if (e.size() == 1) return RationalDirection::axis(1, 0, e[0] < 0 ? -1 : 1);
  Projection pr = project(e, max_denominator);
  return at_level(e.size(), pr, max_denominator);
}

// ---------------------------------------------------------------------------
// frames

OrthogonalFrame orthogonal_basis(const RationalDirection& zeta) {
  OrthogonalFrame f;
  const std::size_t n = zeta.dimension();
  f.dimension = n;
  for (std::size_t i = 0; i < n; ++i) (zeta[i] != 0 ? f.active : f.inactive).push_back(i);
  const std::size_t d = f.active.size();

  std::vector<Rational> b(d);
  for (std::size_t i = 0; i < d; ++i) b[i] = zeta[f.active[i]];
  f.beta.push_back(b);

  if (d == 2 && n == 2) {
    f.beta.push_back({-b[1], b[0]});
  } else if (d >= 2) {
    f.gram_schmidt = true;
    // Gram-Schmidt on {beta_1, e_1, ..., e_{d-1}} inside Q^d
    for (std::size_t l = 0; l + 1 < d; ++l) {
      std::vector<Rational> v(d, Rational(0));
      v[l] = 1;
      for (const auto& u : f.beta) {
        Rational coef = dot(v, u) / dot(u, u);
        for (std::size_t i = 0; i < d; ++i) v[i] -= coef * u[i];
      }
      f.beta.push_back(std::move(v));
    }
  }

  for (const auto& bv : f.beta) {
    std::vector<Rational> full(n, Rational(0));
    for (std::size_t i = 0; i < d; ++i) full[f.active[i]] = bv[i];
    f.norms_squared.push_back(dot(bv, bv));
    f.basis.push_back(std::move(full));
  }
  for (std::size_t l : f.inactive) {
    std::vector<Rational> full(n, Rational(0));
    full[l] = 1;
    f.basis.push_back(std::move(full));
    f.norms_squared.push_back(1);
  }
  return f;
}

namespace {

Integer lcm(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// integer vector x with x.w = gcd(w) (= 1 for primitive w)
std::vector<Integer> bezout_vector(const std::vector<Integer>& w) {
  std::vector<Integer> x(w.size(), Integer(0));
  Integer g = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    if (g == 0) {
      g = abs(w[i]);
      x[i] = sgn(w[i]);
      continue;
    }
    Integer gn, s, t;
    mpz_gcdext(gn.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), w[i].get_mpz_t());
    for (std::size_t j = 0; j < i; ++j) x[j] *= s;
    x[i] = t;
    g = gn;
  }
  return x;
}

// coefficient convention: k = sum tau_i p_i beta_i
std::vector<Rational> closed_form_coefficients(const OrthogonalFrame& f) {
  const std::size_t n = f.dimension, d = f.active_count();
  std::vector<Rational> tau(n, Rational(1));
  if (d < 2) return tau;
  std::vector<Integer> m(d), q(d);
  for (std::size_t i = 0; i < d; ++i) {
    m[i] = f.beta[0][i].get_num();
    q[i] = f.beta[0][i].get_den();
  }
  auto prod_abs = [&](std::size_t from) {
    Integer p = 1;
    for (std::size_t i = from; i < d; ++i) p *= abs(q[i]);
    return p;
  };
  if (n == 2) {
    Rational t(1, q[0] * q[1]);
    t.canonicalize();
    tau[0] = tau[1] = t;
    return tau;
  }
  tau[0] = Rational(1, prod_abs(0));
  tau[0].canonicalize();
  tau[1] = Rational(1, (q[0] * q[0] - m[0] * m[0]) * prod_abs(1));
  tau[1].canonicalize();
  for (std::size_t l = 2; l < d; ++l) {  // l counts from zero
    if (l + 1 == d) {
      tau[l] = Rational(1, abs(m[d - 1] * q[d - 2]));
    } else {
      Rational s = 0;
      Integer sq = 1;
      for (std::size_t i = l; i < d; ++i) {
        s += f.beta[0][i] * f.beta[0][i];
        sq *= q[i] * q[i];
      }
      tau[l] = 1 / (Rational(abs(q[l - 1])) * s * Rational(sq));
    }
    tau[l].canonicalize();
  }
  return tau;
}

}  // namespace

LatticeDecomposition lattice_periods(const OrthogonalFrame& f) {
  LatticeDecomposition L;
  const std::size_t n = f.dimension;
  const auto cf = closed_form_coefficients(f);
  L.common_denominator = 1;
  std::vector<Rational> rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = f.basis[i];
    Rational g = rational_gcd(b);
    L.gcds.push_back(g);
    L.periods.push_back({g, 1 / f.norms_squared[i]});
    L.cell_periods.push_back({1 / g, f.norms_squared[i]});
    L.closed_form_periods.push_back({cf[i], f.norms_squared[i]});
    Rational quot = g / (cf[i] * f.norms_squared[i]);
    if (quot.get_den() != 1 || quot <= 0)
      throw NotInLattice("closed-form period does not divide g_" + std::to_string(i + 1) + ": " +
                         to_string(quot));
    L.closed_form_quotients.push_back(quot.get_num());
    std::vector<Integer> w(n);
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = b[j] / g;
      if (v.get_den() != 1) throw NotInLattice("beta_i / g_i is not integral");
      w[j] = v.get_num();
    }
    L.primitive.push_back(std::move(w));
    rho[i] = g * g / f.norms_squared[i];
    L.common_denominator = lcm(L.common_denominator, rho[i].get_den());
  }
  for (std::size_t i = 0; i < n; ++i)
    L.weights.push_back(rho[i].get_num() * (L.common_denominator / rho[i].get_den()));

  L.time_generator = bezout_vector(L.primitive[0]);
  for (std::size_t i = 1; i < n; ++i) {
    Integer p = 0;
    for (std::size_t j = 0; j < n; ++j) p += L.time_generator[j] * L.primitive[i][j];
    Rational s = Rational(p) * rho[i];
    s.canonicalize();
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
    s -= fl;
    L.twist.push_back(s);
  }
  // 2^24 bounds keep every product below 2^63 for |k| <= 2^12 and N <= 4
  const Integer cap = Integer(1) << 24;
  L.small = n <= 4 && abs(L.common_denominator) < cap;
  for (std::size_t i = 0; i < n && L.small; ++i) {
    if (abs(L.weights[i]) >= cap) L.small = false;
    for (const auto& w : L.primitive[i])
      if (abs(w) >= cap) L.small = false;
  }
  if (L.small) {
    for (const auto& row : L.primitive)
      for (const auto& w : row) L.primitive_small.push_back(w.get_si());
    for (const auto& w : L.weights) L.weights_small.push_back(w.get_si());
    L.denominator_small = L.common_denominator.get_si();
  }
  return L;
}

std::vector<Integer> decompose_integer_vector(std::span<const long> k, const OrthogonalFrame& frame,
                                              const LatticeDecomposition& periods) {
  const std::size_t n = frame.dimension;
  if (k.size() != n) throw InvalidArgument("integer vector has wrong dimension");
  // (k.beta_i)/g_i = k.(beta_i/g_i); the primitive vectors were checked integral
  std::vector<Integer> p(n);
  const bool small = periods.small && std::all_of(k.begin(), k.end(), [](long v) { return std::labs(v) <= 4096; });
  for (std::size_t i = 0; i < n; ++i) {
    if (small) {
      __int128 s = 0;
      for (std::size_t j = 0; j < n; ++j) s += static_cast<__int128>(periods.primitive_small[i * n + j]) * k[j];
      p[i] = static_cast<long>(s);
      continue;
    }
    Integer s = 0;
    const auto& w = periods.primitive[i];
    for (std::size_t j = 0; j < n; ++j)
      if (k[j] != 0) s += w[j] * k[j];
    p[i] = s;
  }
  return p;
}

std::vector<Rational> reconstruct_integer_vector(std::span<const Integer> p, const OrthogonalFrame& frame,
                                                 const LatticeDecomposition& periods) {
  const std::size_t n = frame.dimension;
  std::vector<Rational> k(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    Rational c = Rational(p[i]) * periods.gcds[i] / frame.norms_squared[i];
    for (std::size_t j = 0; j < n; ++j) k[j] += c * frame.basis[i][j];
  }
  return k;
}

bool reconstruction_holds(std::span<const long> k, std::span<const Integer> p,
                          const LatticeDecomposition& periods) {
  const std::size_t n = k.size();
  if (periods.small && std::all_of(p.begin(), p.end(), [](const Integer& v) { return abs(v) < (1L << 40); })) {
    long ps[8];
    for (std::size_t i = 0; i < n; ++i) ps[i] = p[i].get_si();
    for (std::size_t j = 0; j < n; ++j) {
      __int128 s = 0;
      for (std::size_t i = 0; i < n; ++i)
        s += static_cast<__int128>(ps[i]) * periods.weights_small[i] * periods.primitive_small[i * n + j];
      if (s != static_cast<__int128>(periods.denominator_small) * k[j]) return false;
    }
    return true;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Integer s = 0;
    for (std::size_t i = 0; i < n; ++i) s += p[i] * periods.weights[i] * periods.primitive[i][j];
    if (s != periods.common_denominator * k[j]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

FrameMatrix moving_frame(std::span<const double> e) {
  check_unit(e);
  const std::size_t n = e.size();
  FrameMatrix F;
  F.dimension = n;
  F.R = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) F.R(i, 0) = e[i];
  std::size_t col = 1;
  for (std::size_t j = 0; j < n && col < n; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t c = 0; c < col; ++c) v -= F.R.col(c).dot(v) * F.R.col(c);
    double nv = v.norm();
    if (nv < 1e-6) continue;
    F.R.col(col++) = v / nv;
  }
  F.hatR = F.R.rightCols(n - 1).transpose();
  return F;
}

FrameMatrix moving_frame(std::span<const double> e, const OrthogonalFrame& frame) {
  check_unit(e);
  const std::size_t n = e.size();
  if (frame.dimension != n) throw InvalidArgument("frame dimension mismatch");
  double err = 0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::fabs(frame.basis[0][i].get_d() - e[i]));
  if (err > 1e-12) throw InvalidArgument("frame direction does not match e");
  FrameMatrix F;
  F.dimension = n;
  F.R = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) F.R(i, 0) = e[i];
  for (std::size_t c = 1; c < n; ++c) {
    double nrm = std::sqrt(frame.norms_squared[c].get_d());
    for (std::size_t i = 0; i < n; ++i) F.R(i, c) = frame.basis[c][i].get_d() / nrm;
  }
  F.hatR = F.R.rightCols(n - 1).transpose();
  auto L = lattice_periods(frame);
  for (std::size_t c = 1; c < n; ++c) F.y_periods.push_back(L.cell_periods[c].value());
  return F;
}

}  // namespace kppfront
