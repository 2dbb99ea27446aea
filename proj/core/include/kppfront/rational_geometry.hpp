#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

namespace kppfront {

using Integer = mpz_class;
using Rational = mpq_class;  // canonical form: lowest terms, positive denominator

std::string to_string(const Rational& q);

// A unit vector with rational coordinates, sum of squares exactly one.
class RationalDirection {
public:
  RationalDirection() = default;
  explicit RationalDirection(std::vector<Rational> coords);

  static RationalDirection axis(std::size_t dimension, std::size_t index, int sign = 1);

  std::size_t dimension() const { return coords_.size(); }
  const std::vector<Rational>& coords() const { return coords_; }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }
  std::vector<double> to_double() const;
  // largest denominator over the coordinates
  Integer max_denominator() const;

private:
  std::vector<Rational> coords_;
};

// coefficient * sqrt(radicand), radicand > 0
struct Surd {
  Rational coefficient;
  Rational radicand;
  double value() const;
};

struct OrthogonalFrame {
  std::size_t dimension = 0;
  std::vector<std::size_t> active;    // I: indices of nonzero coordinates
  std::vector<std::size_t> inactive;  // complement of I
  // beta_1..beta_d restricted to I (length d each)
  std::vector<std::vector<Rational>> beta;
  // N vectors in R^N: beta_i embedded, followed by e_l for l in the complement
  std::vector<std::vector<Rational>> basis;
  std::vector<Rational> norms_squared;  // one per basis vector
  bool gram_schmidt = false;            // N >= 3 and d >= 2

  std::size_t active_count() const { return active.size(); }
};

struct LatticeDecomposition {
  std::vector<Rational> gcds;   // g_i
  std::vector<Surd> periods;    // tau_i = g_i / |beta_i|
  // closed-form periods, as lengths along the normalized basis vectors
  std::vector<Surd> closed_form_periods;
  std::vector<Integer> closed_form_quotients;  // g_i / (tau_i^cf |beta_i|)
  // primitive integer vectors beta_i / g_i
  std::vector<std::vector<Integer>> primitive;
  // reconstruction: D * k = sum_i p_i * weights_i * primitive_i
  std::vector<Integer> weights;
  Integer common_denominator;
  // space-time cell: y-periods T_i = |beta_i| / g_i for i >= 2
  std::vector<Surd> cell_periods;
  // integer vector k* with k*.zeta = g_1, and the induced y-shift over one
  // time period, as a fraction of each cell period, reduced to [0,1)
  std::vector<Integer> time_generator;
  std::vector<Rational> twist;
  // machine-word copies of primitive/weights/common_denominator when they fit
  // comfortably; lets the integer checks skip GMP for the usual small cases
  bool small = false;
  std::vector<long> primitive_small;  // row-major n x n
  std::vector<long> weights_small;
  long denominator_small = 0;
};

struct FrameMatrix {
  std::size_t dimension = 0;
  Eigen::MatrixXd R;     // columns e, zeta_2/|zeta_2|, ...
  Eigen::MatrixXd hatR;  // rows zeta_2/|zeta_2|, ...
  std::vector<double> y_periods;  // cell periods T_2..T_N when a frame is supplied
};

RationalDirection rationalize_direction(std::span<const double> e, double angle_tol,
                                        long max_denominator);
// Best approximation with all convergent denominators bounded by max_denominator.
RationalDirection closest_rational_direction(std::span<const double> e, long max_denominator);
double angle_between(const RationalDirection& zeta, std::span<const double> e);

OrthogonalFrame orthogonal_basis(const RationalDirection& zeta);
LatticeDecomposition lattice_periods(const OrthogonalFrame& frame);

std::vector<Integer> decompose_integer_vector(std::span<const long> k, const OrthogonalFrame& frame,
                                              const LatticeDecomposition& periods);
// sum_i tau_i p_i zeta_i, evaluated exactly (tau_i zeta_i = g_i beta_i / |beta_i|^2)
std::vector<Rational> reconstruct_integer_vector(std::span<const Integer> p,
                                                 const OrthogonalFrame& frame,
                                                 const LatticeDecomposition& periods);
// Same identity checked in integers through the precomputed weights.
bool reconstruction_holds(std::span<const long> k, std::span<const Integer> p,
                          const LatticeDecomposition& periods);

FrameMatrix moving_frame(std::span<const double> e);
FrameMatrix moving_frame(std::span<const double> e, const OrthogonalFrame& frame);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
Rational rational_gcd(std::span<const Rational> values);

}  // namespace kppfront
