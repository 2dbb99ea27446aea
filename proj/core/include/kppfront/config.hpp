#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kppfront/front.hpp"
#include "kppfront/medium.hpp"
#include "kppfront/rational_geometry.hpp"

namespace kppfront {

// Sectioned key=value text:
//
//   [medium]
//   dimension = 2
//   family = logistic
//   growth = 1 + 0.5*sin(1,0)
//   a11 = 1 + 0.25*sin(0,1)
//   a22 = 1 + 0.25*sin(0,1)
//
// Unknown sections or keys raise ConfigError.
struct RunConfig {
  std::string text;  // raw input, hashed into the manifest
  std::string base_dir;

  // [medium]
  std::size_t dimension = 1;
  std::string name;
  ReactionFamily family = ReactionFamily::Logistic;
  double exponent = 1;
  double theta = 1;
  double holder_alpha = 0;
  std::string growth = "1";
  std::map<std::string, std::string> diffusion;  // "a11" -> expression
  std::string grid_file;                         // gridded coefficients instead of expressions

  // [direction]
  std::vector<std::string> vector;  // rationals "3/5" or decimals
  std::optional<double> angle;      // N = 2 only, radians
  std::optional<std::pair<double, double>> angles;  // N = 3: polar, azimuth
  std::vector<double> angle_tols{1e-2, 1e-3, 1e-4};
  long max_denominator = 1000000;

  // [solver]
  std::optional<double> c;
  std::optional<double> c_offset;
  std::optional<double> eps_rel;
  std::vector<double> a_schedule{20, 40};
  std::size_t torus_n = 32;
  std::size_t n_xi = 600;
  std::size_t n_t = 64;
  std::vector<std::size_t> n_y;
  std::size_t direction_count = 64;
  std::vector<double> lambdas;  // eig table
  StripTolerances tols;
  std::size_t residual_samples = 400;
  long residual_radius = 2;

  // [output]
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "svg"};

  bool has_direction() const { return !vector.empty() || angle || angles; }
};

RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// scale every solver tolerance by factor
void scale_tolerances(RunConfig& cfg, double factor);

MediumSpec build_medium(const RunConfig& cfg);
// rational direction from [direction]; decimal input is rationalized at the finest angle tolerance
RationalDirection build_direction(const RunConfig& cfg);
std::vector<double> real_direction(const RunConfig& cfg);
StripResolution build_resolution(const RunConfig& cfg);

// gridded medium CSV: "shape,n1,...,nN" line, header with a_ij / r columns, one row per node
MediumSpec load_gridded_medium(const std::string& path, std::size_t dimension);

Rational parse_rational(const std::string& text);

}  // namespace kppfront
