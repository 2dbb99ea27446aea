#include "kppfront/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "kppfront/config.hpp"
#include "kppfront/errors.hpp"

namespace kppfront {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

namespace {

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

template <class T>
std::string join(const std::vector<T>& v, const char* sep = ",") {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto f = open_out(path);
  f << join(header) << '\n';
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += ',';
      line += format_double(r[i]);
    }
    f << line << '\n';
  }
}

void write_polar_svg(const std::string& path, const SweepTable& table) {
  if (table.dimension != 2) throw InvalidArgument("polar plots need an N = 2 sweep");
  double cmax = 0;
  for (const auto& e : table.entries)
    if (e.ok) cmax = std::max(cmax, e.c_star);
  if (!(cmax > 0)) throw InvalidArgument("sweep has no successful entries");
  const double size = 480, mid = size / 2, scale = 0.42 * size / cmax;
  auto f = open_out(path);
  char buf[160];
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // rings at round fractions of the largest speed
  for (int k = 1; k <= 4; ++k) {
    double r = cmax * k / 4;
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"none\" stroke=\"#ccc\"/>\n"
                  "<text x=\"%.3f\" y=\"%.3f\" font-size=\"10\" fill=\"#888\">%.3g</text>\n",
                  mid, mid, r * scale, mid + r * scale + 2, mid - 2, r);
    f << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<line x1=\"0\" y1=\"%.3f\" x2=\"480\" y2=\"%.3f\" stroke=\"#ccc\"/>\n"
                "<line x1=\"%.3f\" y1=\"0\" x2=\"%.3f\" y2=\"480\" stroke=\"#ccc\"/>\n",
                mid, mid, mid, mid);
  f << buf;
  f << "<polygon fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (const auto& e : table.entries) {
    if (!e.ok) continue;
    double th = e.angles[0];
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", first ? "" : " ", mid + scale * e.c_star * std::cos(th),
                  mid - scale * e.c_star * std::sin(th));
    f << buf;
    first = false;
  }
  f << "\"/>\n</svg>\n";
}

void Manifest::write(const std::string& path) const {
  auto f = open_out(path);
  for (const auto& [k, v] : entries_) f << k << " = " << v << '\n';
}

void write_profile(const std::string& dir, const FrontProfile& p) {
  const StripGrid& g = p.grid();
  const std::size_t N = p.spec.dimension, ny = g.y_count();
  std::vector<std::string> header{"xi", "t"};
  for (std::size_t k = 2; k <= N; ++k) header.push_back("y" + std::to_string(k));
  header.push_back("phi");
  std::vector<std::vector<double>> rows;
  rows.reserve(g.size());
  std::vector<double> y(N > 1 ? N - 1 : 1);
  for (std::size_t l = 0; l < g.n_t; ++l)
    for (std::size_t iy = 0; iy < ny; ++iy) {
      g.y_at(iy, y);
      for (std::size_t j = 0; j <= g.n_xi; ++j) {
        std::vector<double> r{g.xi(j), g.dt * static_cast<double>(l)};
        for (std::size_t k = 0; k + 1 < N; ++k) r.push_back(y[k]);
        r.push_back(p.strip.values[g.index(l, j, iy)]);
        rows.push_back(std::move(r));
      }
    }
  write_csv(dir + "/profile.csv", header, rows);

  std::vector<std::vector<double>> means;
  for (std::size_t j = 0; j <= g.n_xi; ++j) {
    double xi = g.xi(j);
    means.push_back({xi, xi - p.xi_offset, p.cell_mean(xi), p.cell_min(xi), p.cell_max(xi)});
  }
  write_csv(dir + "/profile_mean.csv", {"xi", "xi_normalized", "mean", "min", "max"}, means);

  auto f = open_out(dir + "/profile.meta");
  std::vector<std::string> z;
  for (const auto& q : p.zeta.coords()) z.push_back(to_string(q));
  f << "direction = " << join(z) << '\n';
  f << "c = " << exact(p.c) << '\n';
  f << "c_star = " << exact(p.c_star) << '\n';
  f << "lambda_c = " << exact(p.lambda_c) << '\n';
  f << "a = " << exact(g.a) << '\n';
  f << "n_xi = " << g.n_xi << '\n';
  f << "n_t = " << g.n_t << '\n';
  f << "period = " << exact(g.period) << '\n';
  f << "n_y = " << join(g.n_y) << '\n';
  std::vector<std::string> cells;
  for (double c : g.cell) cells.push_back(exact(c));
  f << "cell = " << join(cells) << '\n';
  f << "twist_cells = " << join(g.twist) << '\n';
  f << "M = " << exact(p.strip.M) << '\n';
}

FrontProfile read_profile(const std::string& dir, const MediumSpec& spec, const StripTolerances& tols) {
  std::ifstream mf(dir + "/profile.meta");
  if (!mf) throw ConfigError("cannot read '" + dir + "/profile.meta'");
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(mf, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(0, eq), val = line.substr(eq + 1);
    key.erase(key.find_last_not_of(' ') + 1);
    val.erase(0, val.find_first_not_of(' '));
    meta[key] = val;
  }
  auto need = [&](const char* k) -> const std::string& {
    auto it = meta.find(k);
    if (it == meta.end()) throw ConfigError(std::string("profile.meta lacks ") + k);
    return it->second;
  };
  auto list = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  };

  std::vector<Rational> zq;
  for (const auto& s : list(need("direction"))) zq.push_back(parse_rational(s));
  RationalDirection zeta(zq);
  if (zeta.dimension() != spec.dimension) throw ConfigError("stored profile and medium dimensions differ");

  std::vector<std::size_t> n_y;
  std::vector<double> cell, twist;
  for (const auto& s : list(meta["n_y"])) n_y.push_back(std::stoul(s));
  for (const auto& s : list(meta["cell"])) cell.push_back(std::stod(s));
  auto tw = list(meta["twist_cells"]);
  if (n_y.size() + 1 != spec.dimension || cell.size() != n_y.size() || tw.size() != n_y.size())
    throw ConfigError("profile.meta y grid is inconsistent");
  for (std::size_t k = 0; k < tw.size(); ++k) twist.push_back(std::stod(tw[k]) / static_cast<double>(n_y[k]));

  StripSolution S;
  S.grid = StripGrid::make(std::stod(need("a")), std::stoul(need("n_xi")), std::stoul(need("n_t")),
                           std::stod(need("period")), n_y, cell, twist);
  S.c = std::stod(need("c"));
  S.M = std::stod(need("M"));
  S.bounds.c = S.c;
  S.bounds.c_star = std::stod(need("c_star"));
  S.bounds.lambda_c = std::stod(need("lambda_c"));

  const StripGrid& g = S.grid;
  std::ifstream cf(dir + "/profile.csv");
  if (!cf) throw ConfigError("cannot read '" + dir + "/profile.csv'");
  std::getline(cf, line);
  S.values.reserve(g.size());
  while (std::getline(cf, line)) {
    auto pos = line.rfind(',');
    if (pos == std::string::npos) throw ConfigError("malformed profile.csv line");
    S.values.push_back(std::stod(line.substr(pos + 1)));
  }
  if (S.values.size() != g.size()) throw ConfigError("profile.csv does not match profile.meta");
  const std::size_t ny = g.y_count();
  for (std::size_t l = 0; l < g.n_t; ++l)
    for (std::size_t iy = 0; iy < ny; ++iy) {
      S.bc.left.push_back(S.values[g.index(l, 0, iy)]);
      S.bc.right.push_back(S.values[g.index(l, g.n_xi, iy)]);
    }
  return make_profile(spec, zeta, std::move(S), tols);
}

void write_certificates(const std::string& path, const FrontProfile& p, const StripTolerances& tols) {
  auto f = open_out(path);
  const auto& C = p.certificate;
  f << "c = " << format_double(p.c) << '\n';
  f << "c_star = " << format_double(p.c_star) << '\n';
  f << "lambda_c = " << format_double(p.lambda_c) << '\n';
  f << "a_max = " << format_double(p.grid().a) << '\n';
  f << "xi_offset = " << format_double(p.xi_offset) << '\n';
  f << "right_end = " << format_double(p.right_end) << "  # max phi at xi = " << format_double(tols.window_fraction * p.grid().a)
    << ", gate " << format_double(tols.eps_right) << '\n';
  f << "left_end = " << format_double(p.left_end) << "  # max 1 - phi at xi = "
    << format_double(-tols.window_fraction * p.grid().a) << ", gate " << format_double(tols.eps_left) << '\n';
  f << "right_boundary = " << format_double(p.right_boundary) << '\n';
  f << "left_boundary = " << format_double(p.left_boundary) << '\n';
  f << "tail_slope = " << format_double(p.tail_slope) << '\n';
  f << "tail_ok = " << (p.tail_ok ? "true" : "false") << '\n';
  f << "alpha = " << format_double(C.alpha) << '\n';
  f << "h0 = " << format_double(C.h0) << '\n';
  f << "mu = " << format_double(C.mu) << '\n';
  f << "K_prime = " << format_double(C.K_prime) << '\n';
  f << "C0 = " << format_double(C.C0) << '\n';
  f << "max_tail_ratio = " << format_double(C.max_tail_ratio) << '\n';
  f << "left_tail_bound_holds = " << (C.holds ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < p.strip_differences.size(); ++i)
    f << "strip_difference_" << i << " = " << format_double(p.strip_differences[i]) << '\n';
  f << "outer_iterations = " << p.strip.outer_iterations << '\n';
  f << "min_monotone_defect = " << format_double(p.strip.min_monotone_defect) << '\n';
  f << "max_sandwich_excursion = " << format_double(p.strip.max_sandwich_excursion) << '\n';
  f << "clip_magnitude = " << format_double(p.strip.clip_magnitude) << '\n';
}

}  // namespace kppfront
