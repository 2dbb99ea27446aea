#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kppfront/errors.hpp"
#include "kppfront/fields.hpp"
#include "kppfront/rational_geometry.hpp"

namespace kppfront {

// f(x,s) = r(x) g(s)
enum class ReactionFamily { Logistic, WeakAllee, GeneralizedLogistic };

std::string to_string(ReactionFamily f);
ReactionFamily parse_reaction_family(const std::string& name);

struct MediumSpec {
  std::size_t dimension = 1;
  // upper triangle of A, row-major: a11, a12, ..., a1N, a22, ...
  std::vector<ScalarField> diffusion;
  ReactionFamily family = ReactionFamily::Logistic;
  ScalarField growth;   // r(x)
  double exponent = 1;  // q for u(1 - u^q)
  double theta = 1;     // KPP exponent
  double holder_alpha = 0;  // metadata only
  std::string name;

  static MediumSpec homogeneous(std::size_t dimension, double r = 1.0);
  static MediumSpec diagonal(std::vector<double> diag, double r = 1.0);

  std::size_t diffusion_index(std::size_t i, std::size_t j) const;
  const ScalarField& a(std::size_t i, std::size_t j) const { return diffusion[diffusion_index(i, j)]; }

  Eigen::MatrixXd diffusion_at(std::span<const double> x) const;
  // dA/dx_m at x
  Eigen::MatrixXd diffusion_derivative(std::span<const double> x, std::size_t m) const;
  double growth_at(std::span<const double> x) const { return growth.value(x); }
  double shape(double s) const;             // g(s)
  double shape_derivative(double s) const;  // g'(s)
  double reaction(std::span<const double> x, double s) const { return growth.value(x) * shape(s); }
  double reaction_derivative(std::span<const double> x, double s) const {
    return growth.value(x) * shape_derivative(s);
  }
  bool diffusion_constant() const;
  bool is_homogeneous() const;
};

struct Witness {
  std::string check;
  std::vector<double> x;
  double s = 0;
  double value = 0;
};

struct HypothesisReport {
  double gamma_ell = 0;
  double Gamma_ell = 0;
  bool elliptic_ok = false;
  bool symmetric_ok = false;
  bool kpp_ok = false;
  bool zeros_ok = false;
  bool nonneg_ok = false;
  bool monotone_ratio_ok = false;
  double gamma_kpp = 0;
  double growth_min = 0;
  double growth_max = 0;
  double sup_abs_fu = 0;  // sup over samples of |f_u(x,s)|, s in [0,1]
  std::vector<Witness> witnesses;
  std::size_t grid_resolution = 0;
  std::size_t s_samples = 0;

  bool passed() const {
    return elliptic_ok && symmetric_ok && kpp_ok && zeros_ok && nonneg_ok && monotone_ratio_ok;
  }
  // gamma_kpp inflated by the 10% sampling safety factor
  double gamma_kpp_safe() const { return 1.1 * gamma_kpp; }
  std::string summary() const;
};

class ValidationFailed : public Error {
public:
  explicit ValidationFailed(HypothesisReport report);
  HypothesisReport report;
};

std::vector<double> s_ladder(std::size_t count);

HypothesisReport audit_medium(const MediumSpec& spec, std::size_t grid_resolution = 64,
                              std::size_t s_samples = 64);
// audit_medium, throwing ValidationFailed when any flag fails
HypothesisReport validate_medium(const MediumSpec& spec, std::size_t grid_resolution = 64,
                                 std::size_t s_samples = 64);

struct MediumSample {
  Eigen::MatrixXd A;
  double f = 0;
  double fu0 = 0;
};

MediumSample evaluate_medium(const MediumSpec& spec, std::span<const double> X, double s);

// min over T^N x [alpha, 1] of f(x,u)/(1-u); at u = 1 the limit -f_u(x,1) is used
double reaction_h0(const MediumSpec& spec, double alpha, std::size_t grid_resolution = 32,
                   std::size_t u_samples = 64);

// Coefficients of the moving-frame equation: A~ = R^T A(X) R, f~ = f(X, s) with
// X = R (xi + c t, y) reduced mod Z^N.
class MovingCoefficients {
public:
  MovingCoefficients(MediumSpec spec, FrameMatrix frame, double c);

  void position(double xi, double t, std::span<const double> y, std::span<double> X) const;
  Eigen::MatrixXd diffusion(double xi, double t, std::span<const double> y) const;
  double reaction(double xi, double t, std::span<const double> y, double s) const;
  double growth(double xi, double t, std::span<const double> y) const;
  // (dt, dy) of the lattice shift k: t -> t + k.e/c, y -> y + hatR k
  void lattice_shift(std::span<const long> k, double& dt, std::span<double> dy) const;

  const MediumSpec& spec() const { return spec_; }
  const FrameMatrix& frame() const { return frame_; }
  double speed() const { return c_; }
  std::size_t dimension() const { return spec_.dimension; }

private:
  MediumSpec spec_;
  FrameMatrix frame_;
  double c_;
};

MovingCoefficients moving_coefficients(const MediumSpec& spec, const FrameMatrix& R, double c);

// Evaluate a scalar over the n^N torus nodes, node index with first axis fastest.
template <class F>
void for_each_torus_node(std::size_t dimension, std::size_t n, F&& f) {
  std::vector<double> x(dimension, 0.0);
  std::vector<std::size_t> i(dimension, 0);
  std::size_t total = 1;
  for (std::size_t j = 0; j < dimension; ++j) total *= n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t j = 0; j < dimension; ++j) {
      i[j] = r % n;
      r /= n;
      x[j] = static_cast<double>(i[j]) / static_cast<double>(n);
    }
    f(idx, std::span<const double>(x));
  }
}

}  // namespace kppfront
