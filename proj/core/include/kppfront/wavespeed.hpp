#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kppfront/medium.hpp"
#include "kppfront/spectral.hpp"

namespace kppfront {

struct SpeedResult {
  std::vector<double> e;
  double c_star = 0;
  double lambda_star = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  std::size_t evaluations = 0;
  double first_order_defect = 0;  // |lambda k'(lambda) - k| at lambda*, finite-difference k'
};

struct RootResult {
  double c = 0;
  double c_star = 0;
  double lambda_minus = 0;
  double lambda_plus = 0;
  double lambda_star = 0;
  bool double_root = false;
  double residual_minus = 0;  // |k - c lambda| at the roots
  double residual_plus = 0;
};

struct SweepEntry {
  std::vector<double> angles;  // theta (N=2) or (polar, azimuth) (N=3)
  std::vector<double> e;
  double c_star = 0;
  double lambda_star = 0;
  bool ok = false;
  std::string error;
};

struct SweepTable {
  std::size_t dimension = 2;
  std::size_t rows = 0;  // lat-long layout for N=3: rows x cols
  std::size_t cols = 0;
  std::vector<SweepEntry> entries;
  double max_adjacent_jump = 0;
};

SpeedResult minimal_speed(const MediumSpec& spec, std::span<const double> e, const TorusGrid& grid,
                          double tol = 1e-8);
SpeedResult minimal_speed(DispersionEvaluator& ev, std::span<const double> e, double tol);

RootResult decay_rates(const MediumSpec& spec, std::span<const double> e, double c, const TorusGrid& grid,
                       double tol = 1e-8);

SweepTable speed_sweep(const MediumSpec& spec, std::size_t direction_count, const TorusGrid& grid,
                       double tol = 1e-8, std::size_t threads = 1);

}  // namespace kppfront
