#include "kppfront/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kppfront {

std::string to_string(ReactionFamily f) {
  switch (f) {
    case ReactionFamily::Logistic: return "logistic";
    case ReactionFamily::WeakAllee: return "weak_allee";
    case ReactionFamily::GeneralizedLogistic: return "generalized_logistic";
  }
  return "?";
}

ReactionFamily parse_reaction_family(const std::string& name) {
  if (name == "logistic") return ReactionFamily::Logistic;
  if (name == "weak_allee") return ReactionFamily::WeakAllee;
  if (name == "generalized_logistic") return ReactionFamily::GeneralizedLogistic;
  throw ConfigError("unknown reaction family '" + name + "'");
}

MediumSpec MediumSpec::homogeneous(std::size_t dimension, double r) {
  std::vector<double> d(dimension, 1.0);
  return diagonal(d, r);
}

MediumSpec MediumSpec::diagonal(std::vector<double> diag, double r) {
  MediumSpec m;
  m.dimension = diag.size();
  const std::size_t n = m.dimension;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.diffusion.push_back(ScalarField::constant(n, i == j ? diag[i] : 0.0));
  m.growth = ScalarField::constant(n, r);
  m.name = "constant";
  return m;
}

std::size_t MediumSpec::diffusion_index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // row i of the upper triangle starts after i rows of decreasing length
  return i * dimension - i * (i - 1) / 2 + (j - i);
}

Eigen::MatrixXd MediumSpec::diffusion_at(std::span<const double> x) const {
  const std::size_t n = dimension;
  Eigen::MatrixXd A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) A(i, j) = A(j, i) = a(i, j).value(x);
  return A;
}

Eigen::MatrixXd MediumSpec::diffusion_derivative(std::span<const double> x, std::size_t m) const {
  const std::size_t n = dimension;
  Eigen::MatrixXd D(n, n);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      a(i, j).gradient(x, g);
      D(i, j) = D(j, i) = g[m];
    }
  return D;
}

double MediumSpec::shape(double s) const {
  switch (family) {
    case ReactionFamily::Logistic: return s * (1 - s);
    case ReactionFamily::WeakAllee: return s * s * (1 - s);
    case ReactionFamily::GeneralizedLogistic: return s * (1 - std::pow(std::max(s, 0.0), exponent));
  }
  return 0;
}

double MediumSpec::shape_derivative(double s) const {
  switch (family) {
    case ReactionFamily::Logistic: return 1 - 2 * s;
    case ReactionFamily::WeakAllee: return 2 * s - 3 * s * s;
    case ReactionFamily::GeneralizedLogistic:
      return 1 - (exponent + 1) * std::pow(std::max(s, 0.0), exponent);
  }
  return 0;
}

bool MediumSpec::diffusion_constant() const {
  for (const auto& f : diffusion)
    if (!f.is_constant()) return false;
  return true;
}

bool MediumSpec::is_homogeneous() const { return diffusion_constant() && growth.is_constant(); }

// ---------------------------------------------------------------------------

std::string HypothesisReport::summary() const {
  std::ostringstream os;
  os.precision(10);
  os << "gamma_ell = " << gamma_ell << "\nGamma_ell = " << Gamma_ell << "\nelliptic_ok = " << elliptic_ok
     << "\nsymmetric_ok = " << symmetric_ok << "\nkpp_ok = " << kpp_ok << "\nzeros_ok = " << zeros_ok
     << "\nnonneg_ok = " << nonneg_ok << "\nmonotone_ratio_ok = " << monotone_ratio_ok
     << "\ngamma_kpp = " << gamma_kpp << "\ngrowth_min = " << growth_min << "\ngrowth_max = " << growth_max
     << "\nsup_abs_fu = " << sup_abs_fu << "\n";
  for (const auto& w : witnesses) {
    os << "witness " << w.check << ": x = (";
    for (std::size_t j = 0; j < w.x.size(); ++j) os << (j ? ", " : "") << w.x[j];
    os << "), s = " << w.s << ", value = " << w.value << "\n";
  }
  return os.str();
}

ValidationFailed::ValidationFailed(HypothesisReport r)
    : Error("medium failed hypothesis validation\n" + r.summary()), report(std::move(r)) {}

std::vector<double> s_ladder(std::size_t count) {
  std::vector<double> s;
  const std::size_t nlog = count / 2, nlin = count - nlog;
  const double lo = 1e-6, mid = 0.05;
  for (std::size_t i = 0; i < nlog; ++i)
    s.push_back(lo * std::pow(mid / lo, static_cast<double>(i) / static_cast<double>(nlog)));
  for (std::size_t i = 0; i < nlin; ++i)
    s.push_back(mid + (1.0 - mid) * static_cast<double>(i) / static_cast<double>(nlin - 1));
  return s;
}

HypothesisReport audit_medium(const MediumSpec& spec, std::size_t grid_resolution, std::size_t s_samples) {
  if (grid_resolution < 8) throw InvalidArgument("grid_resolution must be >= 8");
  if (s_samples < 16) throw InvalidArgument("s_samples must be >= 16");
  if (spec.dimension < 1 || spec.dimension > 3) throw InvalidArgument("media are supported for N = 1, 2, 3");
  const std::size_t n = spec.dimension;
  HypothesisReport rep;
  rep.grid_resolution = grid_resolution;
  rep.s_samples = s_samples;
  rep.elliptic_ok = rep.symmetric_ok = rep.kpp_ok = rep.zeros_ok = rep.nonneg_ok = rep.monotone_ratio_ok = true;
  rep.gamma_ell = std::numeric_limits<double>::infinity();
  rep.Gamma_ell = -std::numeric_limits<double>::infinity();
  rep.growth_min = std::numeric_limits<double>::infinity();
  rep.growth_max = -std::numeric_limits<double>::infinity();

  const auto ladder = s_ladder(s_samples);
  std::vector<std::size_t> counts(8, 0);
  auto witness = [&](std::size_t slot, const char* check, std::span<const double> x, double s, double v) {
    if (counts[slot]++ < 4) rep.witnesses.push_back({check, std::vector<double>(x.begin(), x.end()), s, v});
  };

  for_each_torus_node(n, grid_resolution, [&](std::size_t, std::span<const double> x) {
    Eigen::MatrixXd A = spec.diffusion_at(x);
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
      rep.symmetric_ok = false;
      witness(0, "symmetric", x, 0, (A - A.transpose()).cwiseAbs().maxCoeff());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    rep.gamma_ell = std::min(rep.gamma_ell, lo);
    rep.Gamma_ell = std::max(rep.Gamma_ell, hi);
    if (!(lo > 0)) {
      rep.elliptic_ok = false;
      witness(1, "elliptic", x, 0, lo);
    }

    double f0 = spec.reaction(x, 0.0), f1 = spec.reaction(x, 1.0);
    if (std::fabs(f0) > 1e-12 || std::fabs(f1) > 1e-12) {
      rep.zeros_ok = false;
      witness(2, "zeros", x, std::fabs(f0) > 1e-12 ? 0.0 : 1.0, std::fabs(f0) > 1e-12 ? f0 : f1);
    }
    double fu0 = spec.reaction_derivative(x, 0.0);
    rep.growth_min = std::min(rep.growth_min, fu0);
    rep.growth_max = std::max(rep.growth_max, fu0);
    if (!(fu0 > 0)) {
      rep.kpp_ok = false;
      witness(3, "kpp_growth", x, 0, fu0);
    }
    rep.sup_abs_fu = std::max({rep.sup_abs_fu, std::fabs(fu0), std::fabs(spec.reaction_derivative(x, 1.0))});

    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double s : ladder) {
      double f = spec.reaction(x, s);
      if (f < -1e-12) {
        rep.nonneg_ok = false;
        witness(4, "nonneg", x, s, f);
      }
      double ratio = f / s;
      if (!(ratio < prev_ratio)) {
        rep.monotone_ratio_ok = false;
        witness(5, "monotone_ratio", x, s, ratio - prev_ratio);
      }
      prev_ratio = ratio;
      double g = (fu0 * s - f) / std::pow(s, 1.0 + spec.theta);
      rep.gamma_kpp = std::max(rep.gamma_kpp, g);
      rep.sup_abs_fu = std::max(rep.sup_abs_fu, std::fabs(spec.reaction_derivative(x, s)));
    }
  });
  return rep;
}

HypothesisReport validate_medium(const MediumSpec& spec, std::size_t grid_resolution, std::size_t s_samples) {
  auto rep = audit_medium(spec, grid_resolution, s_samples);
  if (!rep.passed()) throw ValidationFailed(rep);
  return rep;
}

MediumSample evaluate_medium(const MediumSpec& spec, std::span<const double> X, double s) {
  std::vector<double> x(X.begin(), X.end());
  reduce_torus(x);
  return {spec.diffusion_at(x), spec.reaction(x, s), spec.reaction_derivative(x, 0.0)};
}

double reaction_h0(const MediumSpec& spec, double alpha, std::size_t grid_resolution, std::size_t u_samples) {
  double h0 = std::numeric_limits<double>::infinity();
  for_each_torus_node(spec.dimension, grid_resolution, [&](std::size_t, std::span<const double> x) {
    for (std::size_t i = 0; i < u_samples; ++i) {
      double u = alpha + (1 - alpha) * static_cast<double>(i) / static_cast<double>(u_samples);
      h0 = std::min(h0, spec.reaction(x, u) / (1 - u));
    }
    h0 = std::min(h0, -spec.reaction_derivative(x, 1.0));
  });
  return h0;
}

// ---------------------------------------------------------------------------

MovingCoefficients::MovingCoefficients(MediumSpec spec, FrameMatrix frame, double c)
    : spec_(std::move(spec)), frame_(std::move(frame)), c_(c) {
  if (c_ == 0) throw InvalidArgument("speed must be nonzero");
  if (frame_.dimension != spec_.dimension) throw InvalidArgument("frame and medium dimensions differ");
}

void MovingCoefficients::position(double xi, double t, std::span<const double> y, std::span<double> X) const {
  const std::size_t n = spec_.dimension;
  const double s = xi + c_ * t;
  for (std::size_t i = 0; i < n; ++i) {
    double v = frame_.R(i, 0) * s;
    for (std::size_t j = 1; j < n; ++j) v += frame_.R(i, j) * y[j - 1];
    X[i] = v;
  }
  reduce_torus(X);
}

Eigen::MatrixXd MovingCoefficients::diffusion(double xi, double t, std::span<const double> y) const {
  std::vector<double> X(spec_.dimension);
  position(xi, t, y, X);
  return frame_.R.transpose() * spec_.diffusion_at(X) * frame_.R;
}

double MovingCoefficients::reaction(double xi, double t, std::span<const double> y, double s) const {
  std::vector<double> X(spec_.dimension);
  position(xi, t, y, X);
  return spec_.reaction(X, s);
}

double MovingCoefficients::growth(double xi, double t, std::span<const double> y) const {
  std::vector<double> X(spec_.dimension);
  position(xi, t, y, X);
  return spec_.growth_at(X);
}

void MovingCoefficients::lattice_shift(std::span<const long> k, double& dt, std::span<double> dy) const {
  const std::size_t n = spec_.dimension;
  double ke = 0;
  for (std::size_t i = 0; i < n; ++i) ke += frame_.R(i, 0) * static_cast<double>(k[i]);
  dt = ke / c_;
  for (std::size_t r = 0; r + 1 < n; ++r) {
    double v = 0;
    for (std::size_t i = 0; i < n; ++i) v += frame_.hatR(r, i) * static_cast<double>(k[i]);
    dy[r] = v;
  }
}

MovingCoefficients moving_coefficients(const MediumSpec& spec, const FrameMatrix& R, double c) {
  return MovingCoefficients(spec, R, c);
}

}  // namespace kppfront
