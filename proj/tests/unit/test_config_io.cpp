#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kppfront/config.hpp"
#include "kppfront/errors.hpp"
#include "kppfront/io.hpp"

using namespace kppfront;
namespace fs = std::filesystem;

namespace {

const char* kSinusoidal = R"(# comment
[medium]
dimension = 2
a11 = 1 + 0.25*sin(0,1)
a22 = 1 + 0.25*sin(0,1)
growth = 1 + 0.5*sin(1,0)

[direction]
vector = 3/5, 4/5

[solver]
c_offset = 0.3
a_schedule = 12, 16
n_y = 25
scheme = crank_nicolson
)";

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("kppfront_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesSections) {
  auto cfg = parse_config(kSinusoidal);
  EXPECT_EQ(cfg.dimension, 2u);
  ASSERT_TRUE(cfg.c_offset.has_value());
  EXPECT_DOUBLE_EQ(*cfg.c_offset, 0.3);
  EXPECT_EQ(cfg.a_schedule, (std::vector<double>{12, 16}));
  EXPECT_EQ(cfg.tols.scheme, TimeScheme::CrankNicolson);
  auto z = build_direction(cfg);
  EXPECT_EQ(z[0], Rational(3, 5));
  auto spec = build_medium(cfg);
  EXPECT_FALSE(spec.is_homogeneous());
  EXPECT_FALSE(spec.diffusion_constant());
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse_config("[medium]\ndimension = 1\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse_config("[graphics]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("dimension = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[medium]\ndimension = 1\ndimension = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[medium]\ndimension = 1\n[solver]\nc = 2\nc_offset = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[medium]\ndimension = 1\n[solver]\neps_rel = 0.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[medium]\ndimension = 2\n[direction]\nvector = 1, 0, 0\n"), ConfigError);
}

TEST(Config, ExactDecimals) {
  EXPECT_EQ(parse_rational("0.6"), Rational(3, 5));
  EXPECT_EQ(parse_rational("-12/16"), Rational(-3, 4));
  EXPECT_THROW(parse_rational("1/0"), ConfigError);
  EXPECT_THROW(parse_rational("abc"), ConfigError);
}

TEST(Config, ToleranceScaling) {
  auto cfg = parse_config("[medium]\ndimension = 1\n");
  double before = cfg.tols.tol_outer;
  scale_tolerances(cfg, 10);
  EXPECT_DOUBLE_EQ(cfg.tols.tol_outer, 10 * before);
}

TEST(Config, GriddedMedium) {
  auto dir = scratch("grid");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "m.csv");
    f << "shape,4\nx1,a11,r\n";
    for (int i = 0; i < 4; ++i) f << i / 4.0 << ",1," << (1 + 0.1 * i) << "\n";
  }
  auto spec = load_gridded_medium((dir / "m.csv").string(), 1);
  const double x[1] = {0.25};
  EXPECT_NEAR(spec.growth_at(x), 1.1, 1e-14);
  EXPECT_THROW(load_gridded_medium((dir / "missing.csv").string(), 1), Error);
}

TEST(Io, CsvFormatting) {
  auto dir = scratch("csv");
  write_csv((dir / "t.csv").string(), {"a", "b"}, {{1.0, 0.5}});
  std::ifstream f(dir / "t.csv");
  std::string h, r;
  std::getline(f, h);
  std::getline(f, r);
  EXPECT_EQ(h, "a,b");
  EXPECT_EQ(r, "1.000000000000e+00,5.000000000000e-01");
  EXPECT_NE(fnv1a64("a"), fnv1a64("b"));
}

TEST(Io, ProfileRoundTrip) {
  StripResolution r;
  r.n_xi = 240;
  r.n_t = 4;
  r.torus = TorusGrid(1, 16);
  const double sched[2] = {16, 24};
  StripTolerances tol;
  auto spec = MediumSpec::homogeneous(1);
  auto p = front_from_strips(spec, RationalDirection::axis(1, 0), 2.5, sched, r, tol);
  auto dir = scratch("profile");
  write_profile(dir.string(), p);
  auto q = read_profile(dir.string(), spec, tol);
  EXPECT_NEAR(q.xi_offset, p.xi_offset, 1e-10);
  EXPECT_NEAR(q.cell_mean(1.0), p.cell_mean(1.0), 1e-11);
  write_certificates((dir / "certificates.txt").string(), p, tol);
  EXPECT_TRUE(fs::exists(dir / "certificates.txt"));
}
