#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kppfront/fields.hpp"
#include "kppfront/medium.hpp"

namespace kppfront {

struct TorusGrid {
  std::size_t dimension = 1;
  std::size_t n = 32;

  TorusGrid() = default;
  TorusGrid(std::size_t dimension, std::size_t n);
  double h() const { return 1.0 / static_cast<double>(n); }
  std::size_t size() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct DiscreteOperator {
  SparseMatrix matrix;
  double lambda = 0;
  std::vector<double> e;
  TorusGrid grid;
};

struct EigenPair {
  double lambda = 0;
  std::vector<double> e;
  double k = 0;
  Eigen::VectorXd phi;  // max = 1, strictly positive
  double residual = 0;
  std::size_t iterations = 0;
  TorusGrid grid;

  PeriodicInterpolant interpolant() const;
};

struct DispersionSample {
  double lambda = 0;
  double k = 0;
  double ratio = 0;  // k / lambda
};

struct DispersionReport {
  std::vector<DispersionSample> samples;
  double convexity_violation = 0;  // max k_mid - (k_lo + k_hi)/2 over interior triples, uniform spacing
};

// L_lambda = D + lambda B + lambda^2 C, split once per (medium, e, grid).
class OperatorFamily {
public:
  OperatorFamily(const MediumSpec& spec, std::span<const double> e, const TorusGrid& grid);
  DiscreteOperator at(double lambda) const;
  // dL/dlambda = B + 2 lambda C
  SparseMatrix derivative(double lambda) const;
  const TorusGrid& grid() const { return grid_; }
  const std::vector<double>& direction() const { return e_; }

private:
  TorusGrid grid_;
  std::vector<double> e_;
  SparseMatrix D_, B_, C_;
};

DiscreteOperator assemble_operator(const MediumSpec& spec, std::span<const double> e, double lambda,
                                   const TorusGrid& grid);

EigenPair principal_pair(const DiscreteOperator& op, double tol = 1e-9, std::size_t max_iter = 10000,
                         const Eigen::VectorXd* warm_start = nullptr);

DispersionReport dispersion_curve(const MediumSpec& spec, std::span<const double> e,
                                  std::span<const double> lambdas, const TorusGrid& grid, double tol);

// Cached evaluation of lambda -> k_lambda with warm starts.
class DispersionEvaluator {
public:
  DispersionEvaluator(const MediumSpec& spec, std::span<const double> e, const TorusGrid& grid, double tol);
  double k(double lambda);
  EigenPair pair(double lambda);
  // k and dk/dlambda, the latter from the left eigenvector
  std::pair<double, double> slope(double lambda);
  std::size_t evaluations() const { return evaluations_; }
  const TorusGrid& grid() const { return family_.grid(); }

private:
  OperatorFamily family_;
  double tol_;
  std::optional<Eigen::VectorXd> warm_;
  std::optional<Eigen::VectorXd> warm_left_;
  std::size_t evaluations_ = 0;
};

}  // namespace kppfront
