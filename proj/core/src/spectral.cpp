#include "kppfront/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#include "kppfront/errors.hpp"

namespace kppfront {

TorusGrid::TorusGrid(std::size_t dimension_, std::size_t n_) : dimension(dimension_), n(n_) {
  if (dimension < 1 || dimension > 3) throw InvalidArgument("torus grids support N = 1, 2, 3");
  if (n < 8) throw InvalidArgument("torus grid needs n >= 8");
}

std::size_t TorusGrid::size() const {
  std::size_t s = 1;
  for (std::size_t j = 0; j < dimension; ++j) s *= n;
  return s;
}

PeriodicInterpolant EigenPair::interpolant() const {
  return PeriodicInterpolant(grid.dimension, grid.n, std::vector<double>(phi.data(), phi.data() + phi.size()));
}

namespace {

struct Stencil {
  std::size_t dim, n;
  std::vector<std::size_t> stride;

  Stencil(std::size_t d, std::size_t n_) : dim(d), n(n_), stride(d) {
    std::size_t s = 1;
    for (std::size_t j = 0; j < d; ++j) {
      stride[j] = s;
      s *= n;
    }
  }
  std::size_t shift(std::size_t idx, std::size_t axis, int by) const {
    std::size_t i = (idx / stride[axis]) % n;
    long ni = (static_cast<long>(i) + by + static_cast<long>(n)) % static_cast<long>(n);
    return idx - i * stride[axis] + static_cast<std::size_t>(ni) * stride[axis];
  }
};

bool any_gridded(const MediumSpec& spec) {
  for (const auto& f : spec.diffusion)
    if (f.is_gridded()) return true;
  return false;
}

}  // namespace

OperatorFamily::OperatorFamily(const MediumSpec& spec, std::span<const double> e, const TorusGrid& grid)
    : grid_(grid), e_(e.begin(), e.end()) {
  const std::size_t d = grid.dimension, n = grid.n, total = grid.size();
  if (spec.dimension != d) throw InvalidArgument("medium and torus grid dimensions differ");
  if (e.size() != d) throw InvalidArgument("direction has wrong dimension");
  const double h = grid.h(), h2 = h * h;
  Stencil st(d, n);
  Eigen::Map<const Eigen::VectorXd> ev(e_.data(), static_cast<Eigen::Index>(d));

  // nodal coefficient samples
  std::vector<Eigen::MatrixXd> A(total);
  std::vector<Eigen::VectorXd> Ae(total);
  std::vector<double> fu0(total), divAe(total, 0.0);
  const bool gridded = any_gridded(spec);
  for_each_torus_node(d, n, [&](std::size_t idx, std::span<const double> x) {
    A[idx] = spec.diffusion_at(x);
    Ae[idx] = A[idx] * ev;
    fu0[idx] = spec.reaction_derivative(x, 0.0);
    if (!gridded) {
      double s = 0;
      for (std::size_t m = 0; m < d; ++m) s += (spec.diffusion_derivative(x, m) * ev)(static_cast<Eigen::Index>(m));
      divAe[idx] = s;
    }
  });
  if (gridded)
    for (std::size_t idx = 0; idx < total; ++idx)
      for (std::size_t i = 0; i < d; ++i)
        divAe[idx] += (Ae[st.shift(idx, i, 1)](static_cast<Eigen::Index>(i)) -
                       Ae[st.shift(idx, i, -1)](static_cast<Eigen::Index>(i))) /
                      (2 * h);

  using T = Eigen::Triplet<double>;
  std::vector<T> td, tb, tc;
  td.reserve(total * (1 + 2 * d + 4 * d * d));
  tb.reserve(total * (1 + 2 * d));
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto r = static_cast<int>(idx);
    double diag = fu0[idx];
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      std::size_t p = st.shift(idx, i, 1), m = st.shift(idx, i, -1);
      double ap = 0.5 * (A[idx](ii, ii) + A[p](ii, ii));
      double am = 0.5 * (A[idx](ii, ii) + A[m](ii, ii));
      td.emplace_back(r, static_cast<int>(p), ap / h2);
      td.emplace_back(r, static_cast<int>(m), am / h2);
      diag -= (ap + am) / h2;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        const auto jj = static_cast<Eigen::Index>(j);
        double cp = A[p](ii, jj) / (4 * h2), cm = A[m](ii, jj) / (4 * h2);
        td.emplace_back(r, static_cast<int>(st.shift(p, j, 1)), cp);
        td.emplace_back(r, static_cast<int>(st.shift(p, j, -1)), -cp);
        td.emplace_back(r, static_cast<int>(st.shift(m, j, 1)), -cm);
        td.emplace_back(r, static_cast<int>(st.shift(m, j, -1)), cm);
      }
      double b = -2.0 * Ae[idx](ii) / (2 * h);
      tb.emplace_back(r, static_cast<int>(p), b);
      tb.emplace_back(r, static_cast<int>(m), -b);
    }
    td.emplace_back(r, r, diag);
    tb.emplace_back(r, r, -divAe[idx]);
    tc.emplace_back(r, r, ev.dot(Ae[idx]));
  }
  const auto N = static_cast<Eigen::Index>(total);
  D_.resize(N, N);
  B_.resize(N, N);
  C_.resize(N, N);
  D_.setFromTriplets(td.begin(), td.end());
  B_.setFromTriplets(tb.begin(), tb.end());
  C_.setFromTriplets(tc.begin(), tc.end());
}

DiscreteOperator OperatorFamily::at(double lambda) const {
  DiscreteOperator op;
  op.matrix = D_ + lambda * B_ + (lambda * lambda) * C_;
  op.matrix.prune(0.0);
  op.lambda = lambda;
  op.e = e_;
  op.grid = grid_;
  return op;
}

SparseMatrix OperatorFamily::derivative(double lambda) const {
  SparseMatrix d = B_ + (2 * lambda) * C_;
  return d;
}

DiscreteOperator assemble_operator(const MediumSpec& spec, std::span<const double> e, double lambda,
                                   const TorusGrid& grid) {
  return OperatorFamily(spec, e, grid).at(lambda);
}

// ---------------------------------------------------------------------------

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct ShiftedSolver {
  double sigma = 0;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;

  void factor(const SparseMatrix& L, double s) {
    sigma = s;
    ColMatrix M = -L;
    for (Eigen::Index i = 0; i < M.rows(); ++i) M.coeffRef(i, i) += s;
    M.makeCompressed();
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw NoConvergence("shifted eigen factorization failed");
  }
};

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

double upper_shift(const SparseMatrix& L) {
  bool nonneg = true;
  double rowsum_max = -std::numeric_limits<double>::infinity();
  double gersh = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < L.outerSize(); ++r) {
    double s = 0, g = 0;
    for (SparseMatrix::InnerIterator it(L, r); it; ++it) {
      s += it.value();
      if (it.col() == r) {
        g += it.value();
      } else {
        g += std::fabs(it.value());
        if (it.value() < 0) nonneg = false;
      }
    }
    rowsum_max = std::max(rowsum_max, s);
    gersh = std::max(gersh, g);
  }
  // Collatz-Wielandt bound for essentially nonnegative L, Gershgorin otherwise
  return (nonneg ? rowsum_max : gersh) + 1.0;
}

}  // namespace

EigenPair principal_pair(const DiscreteOperator& op, double tol, std::size_t max_iter,
                         const Eigen::VectorXd* warm_start) {
  if (!(tol > 0)) throw InvalidArgument("tol must be positive");
  const SparseMatrix& L = op.matrix;
  const Eigen::Index n = L.rows();
  Eigen::VectorXd x = (warm_start && warm_start->size() == n && warm_start->minCoeff() > 0)
                          ? *warm_start
                          : Eigen::VectorXd::Ones(n);
  x /= x.maxCoeff();

  ShiftedSolver solver;
  solver.factor(L, upper_shift(L));
  bool refined = false;
  // residuals below a few ulps of |L| are not attainable; tol is clipped there
  double norm = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    double row = 0;
    for (SparseMatrix::InnerIterator itr(L, r); itr; ++itr) row += std::fabs(itr.value());
    norm = std::max(norm, row);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double res_tol = std::max(tol, 64 * eps * norm);

  Eigen::VectorXd Lx = L * x;
  double k = x.dot(Lx) / x.dot(x);
  double k_prev = std::numeric_limits<double>::infinity();
  double residual = (Lx - k * x).cwiseAbs().maxCoeff();

  EigenPair out;
  out.lambda = op.lambda;
  out.e = op.e;
  out.grid = op.grid;
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    Eigen::VectorXd y = solver.lu.solve(x);
    double ymax = y.maxCoeff(), ymin = y.minCoeff();
    if (std::fabs(ymin) > std::fabs(ymax)) y = -y;
    x = y / y.maxCoeff();
    Lx = L * x;
    k_prev = k;
    k = x.dot(Lx) / x.dot(x);
    residual = (Lx - k * x).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, std::fabs(k));
    if (std::fabs(k - k_prev) <= std::max(0.1 * tol, 16 * eps) * scale && residual <= res_tol && x.minCoeff() > 0) break;
    // once k is located, move the shift next to it for a fast rate
    if (!refined && std::fabs(k - k_prev) <= 1e-3 * scale && residual <= 1e-2 * scale) {
      double s = k + std::max(1.0, 0.1 * std::fabs(k));
      if (s < solver.sigma) solver.factor(L, s);
      refined = true;
    }
  }
  if (it == max_iter) throw NoConvergence("principal eigenpair did not converge in " + std::to_string(max_iter) +
                                          " iterations (residual " + format_residual(residual) + ")");
  if (!(x.minCoeff() > 0)) throw NoConvergence("principal eigenvector is not positive");
  out.k = k;
  out.phi = x;
  out.residual = residual;
  out.iterations = it + 1;
  return out;
}

DispersionReport dispersion_curve(const MediumSpec& spec, std::span<const double> e,
                                  std::span<const double> lambdas, const TorusGrid& grid, double tol) {
  DispersionEvaluator ev(spec, e, grid, tol);
  DispersionReport rep;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (i && !(lambdas[i] > lambdas[i - 1])) throw InvalidArgument("lambda values must be increasing");
    double k = ev.k(lambdas[i]);
    rep.samples.push_back({lambdas[i], k, lambdas[i] != 0 ? k / lambdas[i] : std::numeric_limits<double>::infinity()});
  }
  // midpoint test with the interpolation weight for nonuniform spacing
  for (std::size_t i = 1; i + 1 < rep.samples.size(); ++i) {
    const auto &a = rep.samples[i - 1], &b = rep.samples[i], &c = rep.samples[i + 1];
    double w = (b.lambda - a.lambda) / (c.lambda - a.lambda);
    double chord = (1 - w) * a.k + w * c.k;
    rep.convexity_violation = std::max(rep.convexity_violation, b.k - chord);
  }
  return rep;
}

DispersionEvaluator::DispersionEvaluator(const MediumSpec& spec, std::span<const double> e, const TorusGrid& grid,
                                         double tol)
    : family_(spec, e, grid), tol_(tol) {}

EigenPair DispersionEvaluator::pair(double lambda) {
  ++evaluations_;
  auto p = principal_pair(family_.at(lambda), tol_, 10000, warm_ ? &*warm_ : nullptr);
  warm_ = p.phi;
  return p;
}

double DispersionEvaluator::k(double lambda) { return pair(lambda).k; }

std::pair<double, double> DispersionEvaluator::slope(double lambda) {
  EigenPair p = pair(lambda);
  const SparseMatrix L = family_.at(lambda).matrix;
  ShiftedSolver solver;
  solver.factor(L, p.k + std::max(1.0, 0.1 * std::fabs(p.k)));
  const Eigen::Index n = L.rows();
  Eigen::VectorXd psi = (warm_left_ && warm_left_->size() == n && warm_left_->minCoeff() > 0)
                            ? *warm_left_
                            : Eigen::VectorXd::Ones(n);
  psi /= psi.maxCoeff();
  const SparseMatrix Lt = L.transpose();
  const double scale = std::max(1.0, std::fabs(p.k));
  for (int it = 0;; ++it) {
    Eigen::VectorXd y = solver.lu.transpose().solve(psi);
    if (std::fabs(y.minCoeff()) > std::fabs(y.maxCoeff())) y = -y;
    psi = y / y.maxCoeff();
    double res = (Lt * psi - p.k * psi).cwiseAbs().maxCoeff();
    if (res <= 10 * tol_ * scale && psi.minCoeff() > 0) break;
    if (it > 10000) throw NoConvergence("left principal eigenvector did not converge");
  }
  warm_left_ = psi;
  double dk = psi.dot(family_.derivative(lambda) * p.phi) / psi.dot(p.phi);
  return {p.k, dk};
}

}  // namespace kppfront
