#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kppfront/errors.hpp"
#include "kppfront/front.hpp"

namespace kppfront {

double SubSuperPair::psi_plus(double xi, std::span<const double> X) const {
  return interp_c(X) * std::exp(-lambda_c * xi);
}

double SubSuperPair::psi_minus(double xi, std::span<const double> X) const {
  return interp_c(X) * std::exp(-lambda_c * xi) - K * interp_d(X) * std::exp(-(lambda_c + delta) * xi);
}

SubSuperPair build_subsuper(const MediumSpec& spec, std::span<const double> e, double c, const TorusGrid& grid,
                            double theta, double tol) {
  RootResult roots;
  try {
    roots = decay_rates(spec, e, c, grid, tol);
  } catch (const NoRoot& ex) {
    throw NotSupercritical(ex.what());
  }
  if (roots.double_root) throw NotSupercritical("c is within tolerance of c*: no gap for the subsolution");

  SubSuperPair P;
  P.c = c;
  P.c_star = roots.c_star;
  P.e.assign(e.begin(), e.end());
  P.theta = theta;
  P.lambda_c = roots.lambda_minus;
  P.lambda_plus = roots.lambda_plus;
  P.delta = 0.5 * std::min(theta * P.lambda_c, P.lambda_plus - P.lambda_c);

  DispersionEvaluator ev(spec, e, grid, tol / 100);
  P.phi_c = ev.pair(P.lambda_c);
  P.phi_d = ev.pair(P.lambda_c + P.delta);
  P.r_delta = c * (P.lambda_c + P.delta) - P.phi_d.k;
  if (!(P.r_delta > 0)) {
    std::ostringstream os;
    os << "r_delta = " << P.r_delta << " is not positive";
    throw NotSupercritical(os.str());
  }
  P.interp_c = P.phi_c.interpolant();
  P.interp_d = P.phi_d.interpolant();

  const std::size_t d = spec.dimension;
  auto rep = audit_medium(spec, d <= 2 ? 64 : 24, 64);
  P.gamma = rep.gamma_kpp_safe();
  P.M = 1.1 * rep.sup_abs_fu + 1.0;

  const Eigen::VectorXd& A = P.phi_c.phi;
  const Eigen::VectorXd& B = P.phi_d.phi;
  P.min_phi_c = A.minCoeff();
  for (Eigen::Index i = 0; i < A.size(); ++i) {
    P.sup_power_ratio = std::max(P.sup_power_ratio, std::pow(A[i], 1 + theta) / B[i]);
    P.sup_ratio = std::max(P.sup_ratio, A[i] / B[i]);
    P.sup_inverse_ratio = std::max(P.sup_inverse_ratio, B[i] / A[i]);
  }

  // max over xi of A e^{-l xi} - K1 B e^{-(l+d) xi}, attained where
  // e^{-d xi} = l A / ((l + d) K1 B)
  const double l = P.lambda_c, dl = P.delta;
  auto peak = [&](double K1) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < A.size(); ++i) {
      double q = l * A[i] / ((l + dl) * K1 * B[i]);
      m = std::max(m, A[i] * std::pow(q, l / dl) * dl / (l + dl));
    }
    return m;
  };
  P.K1 = 1;
  while (peak(P.K1) > 1) P.K1 *= 2;

  P.K = std::max({P.K1, P.gamma * P.sup_power_ratio / P.r_delta, P.sup_ratio});
  P.a0 = std::max({0.0, -std::log(P.min_phi_c) / l, std::log(P.K * P.sup_inverse_ratio) / dl});
  return P;
}

}  // namespace kppfront
