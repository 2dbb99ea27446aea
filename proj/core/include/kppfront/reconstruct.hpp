#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kppfront/front.hpp"

namespace kppfront {

// (xi, y) of a physical point: (xi + c t, y) = R^T x
void frame_coordinates(const FrameMatrix& R, double c, double t, std::span<const double> x, double& xi,
                       std::span<double> y);
// inverse: x = R (xi + c t, y)
void physical_point(const FrameMatrix& R, double c, double xi, double t, std::span<const double> y,
                    std::span<double> x);

// u(t, x) = phi(xi, t, y)
class PhysicalSolution {
public:
  explicit PhysicalSolution(const FrontProfile& profile) : p_(&profile) {}
  double operator()(double t, std::span<const double> x) const;
  const FrontProfile& profile() const { return *p_; }

private:
  const FrontProfile* p_;
};

double reconstruct_solution(const FrontProfile& profile, double t, std::span<const double> x);

// points of the Halton sequence in [0,1)^dim, skipping the first `skip`
std::vector<double> halton_point(std::size_t index, std::size_t dim);

// all k with |k|_inf <= radius
std::vector<std::vector<long>> lattice_box(std::size_t dimension, long radius);

// max |u(t + k.e/c, x) - u(t, x - k)| over quasi-random (t, x) near the front
double pulsating_residual(const FrontProfile& profile, const std::vector<std::vector<long>>& k_set,
                          std::size_t sample_count, std::size_t seed = 0);

struct PdeResidual {
  double interior = 0;    // moving-frame equation, 4th-order differences at strip nodes
  double profile_eq = 0;  // physical-variable form through the reconstruction; diagnostic
  std::size_t nodes = 0;
};

// interior nodes within |normalized xi| <= half_window (0: whole strip)
PdeResidual pde_residual(const FrontProfile& profile, double half_window = 0, std::size_t samples = 256,
                         std::size_t seed = 0);

// min over samples of the centered time difference of u at fixed x
double monotonicity_check(const FrontProfile& profile, std::size_t sample_count, std::size_t seed = 0);

}  // namespace kppfront
