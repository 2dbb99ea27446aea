#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kppfront {

// Wrap a torus point into [0,1)^N.
void reduce_torus(std::span<double> x);

// amplitude * cos(2 pi k.x) or amplitude * sin(2 pi k.x)
struct TrigTerm {
  double amplitude = 0;
  std::vector<int> wave;
  bool is_sine = false;
};

class TrigPolynomial {
public:
  TrigPolynomial() = default;
  TrigPolynomial(std::size_t dimension, double constant) : dim_(dimension), constant_(constant) {}

  // "1 + 0.5*sin(1,0) - 0.2 cos(0,2)"
  static TrigPolynomial parse(const std::string& text, std::size_t dimension);

  void add(double amplitude, std::vector<int> wave, bool is_sine);

  double value(std::span<const double> x) const;
  // partial derivatives with respect to x_j
  void gradient(std::span<const double> x, std::span<double> out) const;
  double min_sample_bound() const;  // constant - sum |amplitude|
  bool is_constant() const { return terms_.empty(); }
  double constant() const { return constant_; }
  std::size_t dimension() const { return dim_; }
  std::string describe() const;

private:
  std::size_t dim_ = 0;
  double constant_ = 0;
  std::vector<TrigTerm> terms_;
};

// Samples on a uniform n_1 x ... x n_N torus grid, node (i_1..i_N) at x = i/n.
class GriddedField {
public:
  GriddedField() = default;
  GriddedField(std::vector<std::size_t> shape, std::vector<double> values);

  double value(std::span<const double> x) const;      // periodic multilinear
  void gradient(std::span<const double> x, std::span<double> out) const;  // centered differences
  bool is_constant() const;
  std::size_t dimension() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }

private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;  // first index fastest
};

class ScalarField {
public:
  ScalarField() = default;
  ScalarField(TrigPolynomial p) : impl_(std::move(p)) {}
  ScalarField(GriddedField g) : impl_(std::move(g)) {}
  static ScalarField constant(std::size_t dimension, double c) { return TrigPolynomial(dimension, c); }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  bool is_constant() const;
  bool is_gridded() const { return std::holds_alternative<GriddedField>(impl_); }
  std::size_t dimension() const;
  std::string describe() const;

private:
  std::variant<TrigPolynomial, GriddedField> impl_;
};

// Periodic tensor-product cubic (Catmull-Rom) interpolation of nodal data
// on an n^N torus grid; used for eigenfunctions.
class PeriodicInterpolant {
public:
  PeriodicInterpolant() = default;
  PeriodicInterpolant(std::size_t dimension, std::size_t n, std::vector<double> values);

  double operator()(std::span<const double> x) const;
  std::size_t dimension() const { return dim_; }
  std::size_t points_per_axis() const { return n_; }
  const std::vector<double>& values() const { return values_; }

private:
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

}  // namespace kppfront
