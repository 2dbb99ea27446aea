#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/SparseLU>

#include "kppfront/errors.hpp"
#include "kppfront/front.hpp"

namespace kppfront {

StripGrid StripGrid::make(double a, std::size_t n_xi, std::size_t n_t, double period, std::vector<std::size_t> n_y,
                          std::vector<double> cell, std::vector<double> twist_fraction) {
  if (!(a > 0)) throw InvalidArgument("strip half-width must be positive");
  if (n_xi < 4) throw InvalidArgument("n_xi must be >= 4");
  if (n_t < 1) throw InvalidArgument("n_t must be >= 1");
  if (n_y.size() != cell.size() || twist_fraction.size() != cell.size())
    throw InvalidArgument("y grid description is inconsistent");
  StripGrid g;
  g.a = a;
  g.n_xi = n_xi;
  g.h_xi = 2 * a / static_cast<double>(n_xi);
  g.n_t = n_t;
  g.period = period;
  g.dt = period / static_cast<double>(n_t);
  g.n_y = std::move(n_y);
  g.cell = std::move(cell);
  for (std::size_t k = 0; k < g.cell.size(); ++k) {
    if (g.n_y[k] < 1) throw InvalidArgument("n_y must be >= 1");
    g.h_y.push_back(g.cell[k] / static_cast<double>(g.n_y[k]));
    double cells = twist_fraction[k] * static_cast<double>(g.n_y[k]);
    long s = std::lround(cells);
    if (std::fabs(cells - static_cast<double>(s)) > 1e-9)
      throw InvalidArgument("n_y is not compatible with the period twist");
    g.twist.push_back(s % static_cast<long>(g.n_y[k]));
    g.twist_length.push_back(twist_fraction[k] * g.cell[k]);
  }
  return g;
}

std::size_t StripGrid::y_count() const {
  std::size_t s = 1;
  for (auto n : n_y) s *= n;
  return s;
}

void StripGrid::y_at(std::size_t iy, std::span<double> y) const {
  for (std::size_t k = 0; k < n_y.size(); ++k) {
    y[k] = h_y[k] * static_cast<double>(iy % n_y[k]);
    iy /= n_y[k];
  }
}

// ---------------------------------------------------------------------------

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;

}  // namespace

struct PeriodicStripSolver::Impl {
  StripGrid g;
  double M = 0;
  TimeScheme scheme = TimeScheme::ImplicitEuler;
  double theta = 1;  // implicit weight
  std::size_t dim = 1;
  bool one_d = true;
  std::size_t mats = 1;  // distinct levels
  std::vector<long> ystride;

  // L + M on interior rows
  std::vector<SparseMatrix> op;
  std::vector<std::unique_ptr<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>>> lu;
  // 1D: bands of L + M and Thomas factors of the step matrix
  std::vector<std::vector<double>> lo, di, up;
  std::vector<std::vector<double>> cp, inv;

  std::size_t level_matrix(std::size_t l) const { return mats == 1 ? 0 : l; }

  std::size_t neighbor(std::size_t node, std::size_t axis, int dir) const {
    const std::size_t nx = g.n_xi + 1;
    if (axis == 0) return dir > 0 ? node + 1 : node - 1;
    const std::size_t k = axis - 1;
    const std::size_t iy = node / nx;
    const std::size_t stride = static_cast<std::size_t>(ystride[k]);
    const std::size_t ik = (iy / stride) % g.n_y[k];
    const std::size_t nk = (ik + g.n_y[k] + static_cast<std::size_t>(dir > 0 ? 1 : g.n_y[k] - 1)) % g.n_y[k];
    return node - ik * stride * nx + nk * stride * nx;
  }

  double spacing(std::size_t axis) const { return axis == 0 ? g.h_xi : g.h_y[axis - 1]; }

  void assemble(const MovingCoefficients& coeffs, std::size_t level) {
    const std::size_t nodes = g.nodes(), nx = g.n_xi + 1, N = dim;
    const double t = g.dt * static_cast<double>(level);
    const double c = coeffs.speed();
    std::vector<double> At(nodes * N * N);
    std::vector<double> y(N > 1 ? N - 1 : 1, 0.0);
    for (std::size_t node = 0; node < nodes; ++node) {
      std::size_t j = node % nx, iy = node / nx;
      g.y_at(iy, y);
      Eigen::MatrixXd A = coeffs.diffusion(g.xi(j), t, std::span<const double>(y.data(), N - 1));
      for (std::size_t p = 0; p < N; ++p)
        for (std::size_t q = 0; q < N; ++q) At[node * N * N + p * N + q] = A(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    }
    auto a = [&](std::size_t node, std::size_t p, std::size_t q) { return At[node * N * N + p * N + q]; };

    std::vector<Triplet> trip;
    trip.reserve(nodes * (1 + 2 * N + 4 * N * N + 2));
    for (std::size_t node = 0; node < nodes; ++node) {
      std::size_t j = node % nx;
      if (j == 0 || j == g.n_xi) continue;
      const int r = static_cast<int>(node);
      double diag = M;
      for (std::size_t i = 0; i < N; ++i) {
        const double hi = spacing(i);
        std::size_t p = neighbor(node, i, 1), m = neighbor(node, i, -1);
        double ap = 0.5 * (a(node, i, i) + a(p, i, i));
        double am = 0.5 * (a(node, i, i) + a(m, i, i));
        trip.emplace_back(r, static_cast<int>(p), -ap / (hi * hi));
        trip.emplace_back(r, static_cast<int>(m), -am / (hi * hi));
        diag += (ap + am) / (hi * hi);
        for (std::size_t k = 0; k < N; ++k) {
          if (k == i) continue;
          const double w = 1.0 / (4 * hi * spacing(k));
          double cpl = a(p, i, k) * w, cml = a(m, i, k) * w;
          trip.emplace_back(r, static_cast<int>(neighbor(p, k, 1)), -cpl);
          trip.emplace_back(r, static_cast<int>(neighbor(p, k, -1)), cpl);
          trip.emplace_back(r, static_cast<int>(neighbor(m, k, 1)), cml);
          trip.emplace_back(r, static_cast<int>(neighbor(m, k, -1)), -cml);
        }
      }
      trip.emplace_back(r, static_cast<int>(node + 1), -c / (2 * g.h_xi));
      trip.emplace_back(r, static_cast<int>(node - 1), c / (2 * g.h_xi));
      trip.emplace_back(r, r, diag);
    }
    const auto n = static_cast<Eigen::Index>(nodes);
    SparseMatrix L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    L.prune(0.0);

    if (one_d) {
      std::vector<double> l(nodes, 0.0), d(nodes, 0.0), u(nodes, 0.0);
      for (Eigen::Index row = 0; row < n; ++row)
        for (SparseMatrix::InnerIterator it(L, row); it; ++it) {
          if (it.col() == row - 1) l[row] = it.value();
          else if (it.col() == row) d[row] = it.value();
          else if (it.col() == row + 1) u[row] = it.value();
          else throw InvalidArgument("1D strip operator is not tridiagonal");
        }
      // step matrix: 1/dt + theta (L + M) on interior rows, identity on the boundary
      std::vector<double> bl(nodes), bd(nodes), bu(nodes);
      for (std::size_t row = 0; row < nodes; ++row) {
        bool boundary = row == 0 || row == g.n_xi;
        bl[row] = boundary ? 0.0 : theta * l[row];
        bd[row] = boundary ? 1.0 : 1.0 / g.dt + theta * d[row];
        bu[row] = boundary ? 0.0 : theta * u[row];
      }
      std::vector<double> c2(nodes), iv(nodes);
      double den = bd[0];
      iv[0] = 1 / den;
      c2[0] = bu[0] * iv[0];
      for (std::size_t row = 1; row < nodes; ++row) {
        den = bd[row] - bl[row] * c2[row - 1];
        iv[row] = 1 / den;
        c2[row] = bu[row] * iv[row];
      }
      lo.push_back(std::move(l));
      di.push_back(std::move(d));
      up.push_back(std::move(u));
      cp.push_back(std::move(c2));
      inv.push_back(std::move(iv));
      // keep the sub-diagonal of the step matrix for the forward sweep
      step_lo.push_back(std::move(bl));
    } else {
      ColMatrix B(n, n);
      std::vector<Triplet> bt;
      bt.reserve(static_cast<std::size_t>(L.nonZeros()) + nodes);
      for (Eigen::Index row = 0; row < n; ++row) {
        std::size_t j = static_cast<std::size_t>(row) % nx;
        if (j == 0 || j == g.n_xi) {
          bt.emplace_back(static_cast<int>(row), static_cast<int>(row), 1.0);
          continue;
        }
        bt.emplace_back(static_cast<int>(row), static_cast<int>(row), 1.0 / g.dt);
        for (SparseMatrix::InnerIterator it(L, row); it; ++it)
          bt.emplace_back(static_cast<int>(row), static_cast<int>(it.col()), theta * it.value());
      }
      B.setFromTriplets(bt.begin(), bt.end());
      B.makeCompressed();
      auto solver = std::make_unique<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>>();
      solver->compute(B);
      if (solver->info() != Eigen::Success) throw NoConvergence("strip step factorization failed");
      lu.push_back(std::move(solver));
    }
    op.push_back(std::move(L));
  }
  std::vector<std::vector<double>> step_lo;

  void solve_level(std::size_t level, std::vector<double>& b) const {
    const std::size_t m = level_matrix(level);
    if (one_d) {
      const auto& l = step_lo[m];
      const auto& c2 = cp[m];
      const auto& iv = inv[m];
      const std::size_t n = b.size();
      b[0] *= iv[0];
      for (std::size_t r = 1; r < n; ++r) b[r] = (b[r] - l[r] * b[r - 1]) * iv[r];
      for (std::size_t r = n - 1; r-- > 0;) b[r] -= c2[r] * b[r + 1];
      return;
    }
    Eigen::Map<Eigen::VectorXd> v(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = lu[m]->solve(v);
    v = x;
  }

  void apply(std::size_t level, const double* v, double* out) const {
    const std::size_t m = level_matrix(level);
    const std::size_t n = g.nodes();
    if (one_d) {
      const auto &l = lo[m], &d = di[m], &u = up[m];
      out[0] = out[n - 1] = 0;
      for (std::size_t r = 1; r + 1 < n; ++r) out[r] = l[r] * v[r - 1] + d[r] * v[r] + u[r] * v[r + 1];
      return;
    }
    Eigen::Map<const Eigen::VectorXd> vin(v, static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::VectorXd> vo(out, static_cast<Eigen::Index>(n));
    vo.noalias() = op[m] * vin;
  }

  // (S v)(j, iy) = v(j, iy + twist)
  void shift(const double* in, double* out) const {
    const std::size_t nx = g.n_xi + 1, ny = g.y_count();
    bool none = true;
    for (long s : g.twist) none = none && s == 0;
    if (none) {
      std::copy(in, in + nx * ny, out);
      return;
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
      std::size_t src = 0, rem = iy;
      for (std::size_t k = 0; k < g.n_y.size(); ++k) {
        std::size_t ik = rem % g.n_y[k];
        rem /= g.n_y[k];
        std::size_t sk = (ik + static_cast<std::size_t>(g.twist[k])) % g.n_y[k];
        src += sk * static_cast<std::size_t>(ystride[k]);
      }
      std::copy(in + src * nx, in + src * nx + nx, out + iy * nx);
    }
  }

  void set_boundary(std::size_t level, const BoundaryData& bc, std::vector<double>& b) const {
    const std::size_t nx = g.n_xi + 1, ny = g.y_count();
    for (std::size_t iy = 0; iy < ny; ++iy) {
      b[iy * nx] = bc.left[level * ny + iy];
      b[iy * nx + g.n_xi] = bc.right[level * ny + iy];
    }
  }
};

PeriodicStripSolver::PeriodicStripSolver(const MovingCoefficients& coeffs, double M, const StripGrid& grid,
                                         TimeScheme scheme)
    : impl_(new Impl) {
  auto& I = *impl_;
  I.g = grid;
  I.M = M;
  I.scheme = scheme;
  I.theta = scheme == TimeScheme::CrankNicolson ? 0.5 : 1.0;
  I.dim = coeffs.dimension();
  if (grid.n_y.size() + 1 != I.dim) throw InvalidArgument("strip grid and medium dimensions differ");
  I.one_d = I.dim == 1;
  long s = 1;
  for (auto n : grid.n_y) {
    I.ystride.push_back(s);
    s *= static_cast<long>(n);
  }
  I.mats = coeffs.spec().diffusion_constant() ? 1 : grid.n_t;
  for (std::size_t l = 0; l < I.mats; ++l) I.assemble(coeffs, l);
}

PeriodicStripSolver::~PeriodicStripSolver() { delete impl_; }
PeriodicStripSolver::PeriodicStripSolver(PeriodicStripSolver&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
PeriodicStripSolver& PeriodicStripSolver::operator=(PeriodicStripSolver&& o) noexcept {
  std::swap(impl_, o.impl_);
  return *this;
}

const StripGrid& PeriodicStripSolver::grid() const { return impl_->g; }
double PeriodicStripSolver::M() const { return impl_->M; }

void PeriodicStripSolver::apply(std::size_t level, std::span<const double> v, std::span<double> out) const {
  impl_->apply(level, v.data(), out.data());
}

void PeriodicStripSolver::shift(std::span<const double> in, std::span<double> out) const {
  impl_->shift(in.data(), out.data());
}

PeriodicSolveReport PeriodicStripSolver::solve(std::span<const double> rhs, const BoundaryData& bc,
                                               std::vector<double>& values, double tol, std::size_t fixed_sweeps,
                                               std::size_t stagnation, std::size_t max_sweeps) const {
  const Impl& I = *impl_;
  const std::size_t nodes = I.g.nodes(), nt = I.g.n_t;
  if (values.size() != nodes * nt || rhs.size() != nodes * nt) throw InvalidArgument("strip vector has wrong size");
  const bool cn = I.scheme == TimeScheme::CrankNicolson;
  const double rdt = 1.0 / I.g.dt;

  std::vector<double> state(values.begin(), values.begin() + static_cast<long>(nodes));
  std::vector<double> b(nodes), tmp(nodes), Lv(nodes);
  PeriodicSolveReport rep;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<double> ratios;
  double last = 0;

  for (std::size_t sweep = 1;; ++sweep) {
    std::vector<double> start = state;
    for (std::size_t m = 1; m <= nt; ++m) {
      const std::size_t l = m % nt, lp = m - 1;
      const double* rp = rhs.data() + lp * nodes;
      const double* rl = rhs.data() + l * nodes;
      if (cn) {
        I.apply(lp, state.data(), Lv.data());
        for (std::size_t i = 0; i < nodes; ++i) b[i] = state[i] * rdt - 0.5 * Lv[i] + 0.5 * rp[i];
      } else {
        for (std::size_t i = 0; i < nodes; ++i) b[i] = state[i] * rdt;
      }
      if (l == 0) {
        I.shift(b.data(), tmp.data());
        b.swap(tmp);
      }
      const double w = cn ? 0.5 : 1.0;
      for (std::size_t i = 0; i < nodes; ++i) b[i] += w * rl[i];
      I.set_boundary(l, bc, b);
      I.solve_level(l, b);
      state = b;
      std::copy(state.begin(), state.end(), values.begin() + static_cast<long>(l * nodes));
    }
    double defect = 0;
    for (std::size_t i = 0; i < nodes; ++i) defect = std::max(defect, std::fabs(state[i] - start[i]));
    rep.sweeps = sweep;
    rep.defect = defect;
    if (sweep > 1 && last > 1e-13 && defect > 1e-14) ratios.push_back(defect / last);
    last = defect;
    if (fixed_sweeps > 0) {
      if (sweep >= fixed_sweeps) break;
      continue;
    }
    if (defect <= tol) break;
    if (defect < 0.999 * best) {
      best = defect;
      since_best = 0;
    } else if (++since_best >= stagnation) {
      std::ostringstream os;
      os << "periodic solve stagnated at defect " << defect << " after " << sweep << " sweeps";
      throw NoConvergence(os.str());
    }
    if (sweep >= max_sweeps) throw NoConvergence("periodic solve exceeded the sweep limit");
  }
  if (!ratios.empty()) {
    std::size_t k = std::min<std::size_t>(5, ratios.size());
    double s = 0;
    for (std::size_t i = ratios.size() - k; i < ratios.size(); ++i) s += std::log(ratios[i]);
    rep.contraction = std::exp(s / static_cast<double>(k));
  }
  return rep;
}

double PeriodicStripSolver::evolve_period(const MediumSpec& spec, std::span<const double> growth,
                                          const BoundaryData& bc, std::vector<double>& values) const {
  const Impl& I = *impl_;
  const std::size_t nodes = I.g.nodes(), nt = I.g.n_t;
  const bool cn = I.scheme == TimeScheme::CrankNicolson;
  const double rdt = 1.0 / I.g.dt;
  std::vector<double> state(values.begin(), values.begin() + static_cast<long>(nodes));
  std::vector<double> start = state, b(nodes), tmp(nodes), Lv(nodes);
  for (std::size_t m = 1; m <= nt; ++m) {
    const std::size_t l = m % nt, lp = m - 1;
    const double* r = growth.data() + lp * nodes;
    if (cn) I.apply(lp, state.data(), Lv.data());
    for (std::size_t i = 0; i < nodes; ++i) {
      double v = state[i];
      b[i] = v * rdt + r[i] * spec.shape(v) + I.M * v - (cn ? 0.5 * Lv[i] : 0.0);
    }
    if (l == 0) {
      I.shift(b.data(), tmp.data());
      b.swap(tmp);
    }
    I.set_boundary(l, bc, b);
    I.solve_level(l, b);
    state = b;
    std::copy(state.begin(), state.end(), values.begin() + static_cast<long>(l * nodes));
  }
  double defect = 0;
  for (std::size_t i = 0; i < nodes; ++i) defect = std::max(defect, std::fabs(state[i] - start[i]));
  return defect;
}

std::vector<double> periodic_linear_solve(const MovingCoefficients& coeffs, double M, std::span<const double> rhs,
                                          const BoundaryData& bc, const StripGrid& grid, double tol_inner,
                                          TimeScheme scheme, PeriodicSolveReport* report,
                                          const std::vector<double>* warm_start) {
  if (!(M > 0)) throw InvalidArgument("M must be positive");
  PeriodicStripSolver solver(coeffs, M, grid, scheme);
  std::vector<double> v = warm_start ? *warm_start : std::vector<double>(grid.size(), 0.0);
  auto rep = solver.solve(rhs, bc, v, tol_inner);
  if (report) *report = rep;
  return v;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> compatible_n_y(const MediumSpec& spec, const LatticeDecomposition& L,
                                        const std::vector<std::size_t>& requested, std::vector<double>& twist) {
  const std::size_t ny = spec.dimension - 1;
  std::vector<std::size_t> out(ny);
  twist.assign(ny, 0.0);
  const bool invariant = spec.is_homogeneous();
  for (std::size_t k = 0; k < ny; ++k) {
    std::size_t want = k < requested.size() ? requested[k] : 0;
    if (invariant) {
      out[k] = want ? want : 1;
      continue;
    }
    const Rational& tw = L.twist[k];
    std::size_t q = tw.get_den().get_ui();
    if (want == 0) want = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(8 * L.cell_periods[k + 1].value())));
    out[k] = ((want + q - 1) / q) * q;
    twist[k] = tw.get_d();
  }
  return out;
}

}  // namespace

StripSolution solve_strip(const MediumSpec& spec, const RationalDirection& zeta, double c, double a,
                          const StripResolution& res, const StripTolerances& tols) {
  const std::size_t N = spec.dimension;
  if (zeta.dimension() != N) throw InvalidArgument("direction and medium dimensions differ");
  const OrthogonalFrame frame = orthogonal_basis(zeta);
  const LatticeDecomposition L = lattice_periods(frame);
  const std::vector<double> e = zeta.to_double();
  const FrameMatrix R = moving_frame(e, frame);
  const SubSuperPair P = build_subsuper(spec, e, c, res.torus, spec.theta, tols.speed_tol);

  const double h = 2 * a / static_cast<double>(res.n_xi);
  const double a_eff = std::max(a, P.a0 + 5 / P.lambda_c);
  const std::size_t n_xi = static_cast<std::size_t>(std::ceil(2 * a_eff / h - 1e-9));
  const double a_used = 0.5 * h * static_cast<double>(n_xi);

  std::vector<double> twist;
  auto n_y = compatible_n_y(spec, L, res.n_y, twist);
  std::vector<double> cell;
  for (std::size_t k = 1; k < N; ++k) cell.push_back(L.cell_periods[k].value());
  const double period = L.gcds[0].get_d() / c;
  StripGrid grid = StripGrid::make(a_used, n_xi, res.n_t, period, n_y, cell, twist);

  MovingCoefficients coeffs(spec, R, c);
  const std::size_t nodes = grid.nodes(), nt = grid.n_t, nx = grid.n_xi + 1, ny = grid.y_count();

  StripSolution S;
  S.grid = grid;
  S.M = P.M;
  S.c = c;
  S.bounds = P;
  S.lower.resize(grid.size());
  S.upper.resize(grid.size());
  std::vector<double> growth(grid.size());
  S.bc.left.resize(nt * ny);
  S.bc.right.resize(nt * ny);
  std::vector<double> y(N > 1 ? N - 1 : 1), X(N);
  for (std::size_t l = 0; l < nt; ++l) {
    const double t = grid.dt * static_cast<double>(l);
    for (std::size_t iy = 0; iy < ny; ++iy) {
      grid.y_at(iy, y);
      for (std::size_t j = 0; j < nx; ++j) {
        const double xi = grid.xi(j);
        coeffs.position(xi, t, std::span<const double>(y.data(), N - 1), X);
        const std::size_t idx = grid.index(l, j, iy);
        growth[idx] = spec.growth_at(X);
        S.lower[idx] = std::max(0.0, P.psi_minus(xi, X));
        S.upper[idx] = std::min(1.0, P.psi_plus(xi, X));
      }
      S.bc.left[l * ny + iy] = S.upper[grid.index(l, 0, iy)];
      S.bc.right[l * ny + iy] = S.lower[grid.index(l, grid.n_xi, iy)];
    }
  }

  PeriodicStripSolver solver(coeffs, P.M, grid, tols.scheme);
  std::vector<double> phi = S.lower, next(grid.size()), rhs(grid.size());
  S.min_monotone_defect = std::numeric_limits<double>::infinity();

  auto audit = [&](const std::vector<double>& cur, const std::vector<double>& prev) {
    double mind = std::numeric_limits<double>::infinity(), upd = 0, exc = 0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double d = cur[i] - prev[i];
      mind = std::min(mind, d);
      upd = std::max(upd, std::fabs(d));
      exc = std::max({exc, S.lower[i] - cur[i], cur[i] - S.upper[i]});
    }
    S.min_monotone_defect = std::min(S.min_monotone_defect, mind);
    S.max_sandwich_excursion = std::max(S.max_sandwich_excursion, exc);
    S.update_history.push_back(upd);
    S.final_update = upd;
    if (exc > tols.sandwich_tol && tols.sandwich == SandwichPolicy::Raise) {
      std::ostringstream os;
      os << "iterate left [max(0,psi-), min(1,psi+)] by " << exc << " at outer step " << S.outer_iterations;
      throw SandwichViolation(os.str(), exc);
    }
    return upd;
  };

  if (tols.direct_evolution) {
    next = phi;
    for (std::size_t it = 1;; ++it) {
      std::vector<double> prev = next;
      double defect = solver.evolve_period(spec, growth, S.bc, next);
      S.outer_iterations = it;
      S.total_sweeps = it;
      S.period_defect = defect;
      S.final_update = defect;
      S.update_history.push_back(defect);
      if (defect <= tols.tol_outer) break;
      if (it >= tols.max_outer) throw NoConvergence("direct evolution did not become time periodic");
    }
    phi = next;
    double exc = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) exc = std::max({exc, S.lower[i] - phi[i], phi[i] - S.upper[i]});
    S.max_sandwich_excursion = exc;
    S.min_monotone_defect = 0;
  } else {
    for (std::size_t it = 1;; ++it) {
      for (std::size_t i = 0; i < phi.size(); ++i) {
        std::size_t node = i % nodes;
        (void)node;
        rhs[i] = growth[i] * spec.shape(phi[i]) + P.M * phi[i];
      }
      next = phi;
      auto rep = solver.solve(rhs, S.bc, next, tols.tol_inner, tols.inner_sweeps, tols.stagnation_sweeps);
      S.total_sweeps += rep.sweeps;
      S.period_defect = rep.defect;
      if (rep.contraction > 0) S.contraction = rep.contraction;
      S.outer_iterations = it;
      double upd = audit(next, phi);
      phi.swap(next);
      if (upd <= tols.tol_outer) break;
      if (it >= tols.max_outer) {
        std::ostringstream os;
        os << "monotone iteration did not converge in " << it << " steps (last update " << upd << ")";
        throw NoConvergence(os.str());
      }
    }
  }

  for (double& v : phi) {
    double cl = std::clamp(v, 0.0, 1.0);
    S.clip_magnitude = std::max(S.clip_magnitude, std::fabs(cl - v));
    v = cl;
  }
  S.values = std::move(phi);
  return S;
}

}  // namespace kppfront
