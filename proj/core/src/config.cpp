#include "kppfront/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kppfront/errors.hpp"

namespace kppfront {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct Entry {
  std::string value;
  int line;
};

double to_double(const std::string& key, const Entry& e) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != e.value.size() || !std::isfinite(v))
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " expects a number, got '" + e.value + "'");
  return v;
}

double positive(const std::string& key, const Entry& e) {
  double v = to_double(key, e);
  if (!(v > 0)) throw ConfigError("line " + std::to_string(e.line) + ": " + key + " must be positive");
  return v;
}

std::size_t to_count(const std::string& key, const Entry& e, std::size_t min = 1) {
  double v = to_double(key, e);
  if (v != std::floor(v) || v < static_cast<double>(min))
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " expects an integer >= " +
                      std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::vector<double> to_doubles(const std::string& key, const Entry& e) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_double(key, {item, e.line}));
  if (out.empty()) throw ConfigError("line " + std::to_string(e.line) + ": " + key + " is empty");
  return out;
}

bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError("line " + std::to_string(e.line) + ": " + key + " expects true/false");
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty number");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      Rational q(trim(s.substr(0, slash)) + "/" + trim(s.substr(slash + 1)), 10);
      if (q.get_den() == 0) throw ConfigError("zero denominator in '" + s + "'");
      q.canonicalize();
      return q;
    }
    // exact decimal: digits before and after the point
    bool neg = s[0] == '-';
    std::string body = (neg || s[0] == '+') ? s.substr(1) : s;
    if (body.find_first_of("eE") != std::string::npos) throw ConfigError("exponent notation");
    auto dot = body.find('.');
    std::string digits = body, frac;
    if (dot != std::string::npos) {
      digits = body.substr(0, dot);
      frac = body.substr(dot + 1);
    }
    if (digits.empty()) digits = "0";
    Integer num(digits + frac, 10);
    Integer den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  } catch (const std::invalid_argument&) {
    throw ConfigError("not a rational number: '" + s + "'");
  }
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"medium",
       {"dimension", "name", "family", "exponent", "theta", "holder_alpha", "growth", "grid_file"}},
      {"direction", {"vector", "angle", "angles", "angle_tols", "max_denominator"}},
      {"solver",
       {"c", "c_offset", "eps_rel", "a_schedule", "torus_n", "n_xi", "n_t", "n_y", "direction_count", "lambdas",
        "tol_inner", "tol_outer", "max_outer", "inner_sweeps", "stagnation_sweeps", "eig_tol", "speed_tol",
        "scheme", "sandwich", "sandwich_tol", "tol_limit", "eps_right", "eps_left", "alpha_low", "tail_lo",
        "tail_hi", "window_fraction", "direct_evolution", "residual_samples", "residual_radius"}},
      {"output", {"directory", "formats"}},
  };

  std::map<std::string, std::map<std::string, Entry>> sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema.count(section)) throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    bool diffusion_key = section == "medium" && key.size() == 3 && key[0] == 'a' && std::isdigit(key[1]) &&
                         std::isdigit(key[2]);
    if (!diffusion_key && !schema.at(section).count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]");
    if (sections[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    sections[section][key] = {value, lineno};
  }

  RunConfig cfg;
  cfg.text = text;
  cfg.base_dir = base_dir;
  auto& med = sections["medium"];
  auto has = [](auto& m, const char* k) { return m.count(k) > 0; };

  if (has(med, "dimension")) cfg.dimension = to_count("dimension", med["dimension"]);
  if (cfg.dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (has(med, "name")) cfg.name = med["name"].value;
  if (has(med, "family")) cfg.family = parse_reaction_family(med["family"].value);
  if (has(med, "exponent")) cfg.exponent = positive("exponent", med["exponent"]);
  if (has(med, "theta")) cfg.theta = positive("theta", med["theta"]);
  if (has(med, "holder_alpha")) cfg.holder_alpha = to_double("holder_alpha", med["holder_alpha"]);
  if (has(med, "growth")) cfg.growth = med["growth"].value;
  if (has(med, "grid_file")) cfg.grid_file = med["grid_file"].value;
  for (auto& [k, e] : med) {
    if (!(k.size() == 3 && k[0] == 'a' && std::isdigit(k[1]))) continue;
    std::size_t i = static_cast<std::size_t>(k[1] - '0'), j = static_cast<std::size_t>(k[2] - '0');
    if (i < 1 || j < 1 || i > cfg.dimension || j > cfg.dimension || i > j)
      throw ConfigError("line " + std::to_string(e.line) + ": " + k + " is not an upper-triangle entry for N = " +
                        std::to_string(cfg.dimension));
    cfg.diffusion[k] = e.value;
  }
  if (!cfg.grid_file.empty() && (!cfg.diffusion.empty() || has(med, "growth")))
    throw ConfigError("grid_file excludes coefficient expressions");

  auto& dir = sections["direction"];
  if (has(dir, "vector")) {
    cfg.vector = split_list(dir["vector"].value);
    if (cfg.vector.size() != cfg.dimension) throw ConfigError("direction vector has the wrong length");
  }
  if (has(dir, "angle")) {
    if (cfg.dimension != 2) throw ConfigError("angle is for N = 2; use angles = polar, azimuth for N = 3");
    cfg.angle = to_double("angle", dir["angle"]);
  }
  if (has(dir, "angles")) {
    auto v = to_doubles("angles", dir["angles"]);
    if (cfg.dimension != 3 || v.size() != 2) throw ConfigError("angles = polar, azimuth is for N = 3");
    cfg.angles = std::make_pair(v[0], v[1]);
  }
  if ((cfg.vector.empty() ? 0 : 1) + (cfg.angle ? 1 : 0) + (cfg.angles ? 1 : 0) > 1)
    throw ConfigError("give exactly one of vector, angle, angles");
  if (has(dir, "angle_tols")) {
    cfg.angle_tols = to_doubles("angle_tols", dir["angle_tols"]);
    for (double v : cfg.angle_tols)
      if (!(v > 0)) throw ConfigError("angle_tols must be positive");
  }
  if (has(dir, "max_denominator"))
    cfg.max_denominator = static_cast<long>(to_count("max_denominator", dir["max_denominator"], 1));

  auto& sol = sections["solver"];
  if (has(sol, "c")) cfg.c = positive("c", sol["c"]);
  if (has(sol, "c_offset")) cfg.c_offset = positive("c_offset", sol["c_offset"]);
  if (has(sol, "eps_rel")) {
    cfg.eps_rel = positive("eps_rel", sol["eps_rel"]);
    if (*cfg.eps_rel > 0.2) throw ConfigError("eps_rel must lie in (0, 0.2]");
  }
  if ((cfg.c ? 1 : 0) + (cfg.c_offset ? 1 : 0) + (cfg.eps_rel ? 1 : 0) > 1)
    throw ConfigError("give at most one of c, c_offset, eps_rel");
  if (has(sol, "a_schedule")) {
    cfg.a_schedule = to_doubles("a_schedule", sol["a_schedule"]);
    for (std::size_t i = 0; i < cfg.a_schedule.size(); ++i)
      if (!(cfg.a_schedule[i] > 0) || (i && !(cfg.a_schedule[i] > cfg.a_schedule[i - 1])))
        throw ConfigError("a_schedule must be positive and increasing");
  }
  if (has(sol, "torus_n")) cfg.torus_n = to_count("torus_n", sol["torus_n"], 8);
  if (has(sol, "n_xi")) cfg.n_xi = to_count("n_xi", sol["n_xi"], 8);
  if (has(sol, "n_t")) cfg.n_t = to_count("n_t", sol["n_t"], 1);
  if (has(sol, "n_y"))
    for (double v : to_doubles("n_y", sol["n_y"])) {
      if (v < 1 || v != std::floor(v)) throw ConfigError("n_y entries must be positive integers");
      cfg.n_y.push_back(static_cast<std::size_t>(v));
    }
  if (has(sol, "direction_count")) cfg.direction_count = to_count("direction_count", sol["direction_count"], 8);
  if (has(sol, "lambdas")) cfg.lambdas = to_doubles("lambdas", sol["lambdas"]);
  auto& T = cfg.tols;
  if (has(sol, "tol_inner")) T.tol_inner = positive("tol_inner", sol["tol_inner"]);
  if (has(sol, "tol_outer")) T.tol_outer = positive("tol_outer", sol["tol_outer"]);
  if (has(sol, "max_outer")) T.max_outer = to_count("max_outer", sol["max_outer"]);
  if (has(sol, "inner_sweeps")) T.inner_sweeps = to_count("inner_sweeps", sol["inner_sweeps"], 0);
  if (has(sol, "stagnation_sweeps")) T.stagnation_sweeps = to_count("stagnation_sweeps", sol["stagnation_sweeps"]);
  if (has(sol, "eig_tol")) T.eig_tol = positive("eig_tol", sol["eig_tol"]);
  if (has(sol, "speed_tol")) T.speed_tol = positive("speed_tol", sol["speed_tol"]);
  if (has(sol, "scheme")) {
    const auto& v = sol["scheme"].value;
    if (v == "implicit_euler") T.scheme = TimeScheme::ImplicitEuler;
    else if (v == "crank_nicolson") T.scheme = TimeScheme::CrankNicolson;
    else throw ConfigError("scheme must be implicit_euler or crank_nicolson");
  }
  if (has(sol, "sandwich")) {
    const auto& v = sol["sandwich"].value;
    if (v == "raise") T.sandwich = SandwichPolicy::Raise;
    else if (v == "report") T.sandwich = SandwichPolicy::Report;
    else throw ConfigError("sandwich must be raise or report");
  }
  if (has(sol, "sandwich_tol")) T.sandwich_tol = positive("sandwich_tol", sol["sandwich_tol"]);
  if (has(sol, "tol_limit")) T.tol_limit = positive("tol_limit", sol["tol_limit"]);
  if (has(sol, "eps_right")) T.eps_right = positive("eps_right", sol["eps_right"]);
  if (has(sol, "eps_left")) T.eps_left = positive("eps_left", sol["eps_left"]);
  if (has(sol, "alpha_low")) {
    T.alpha_low = positive("alpha_low", sol["alpha_low"]);
    if (T.alpha_low >= 1) throw ConfigError("alpha_low must lie in (0,1)");
  }
  if (has(sol, "tail_lo")) T.tail_lo = to_double("tail_lo", sol["tail_lo"]);
  if (has(sol, "tail_hi")) T.tail_hi = to_double("tail_hi", sol["tail_hi"]);
  if (!(T.tail_hi > T.tail_lo)) throw ConfigError("tail_hi must exceed tail_lo");
  if (has(sol, "window_fraction")) {
    T.window_fraction = positive("window_fraction", sol["window_fraction"]);
    if (T.window_fraction > 1) throw ConfigError("window_fraction must be <= 1");
  }
  if (has(sol, "direct_evolution")) T.direct_evolution = to_bool("direct_evolution", sol["direct_evolution"]);
  if (has(sol, "residual_samples")) cfg.residual_samples = to_count("residual_samples", sol["residual_samples"]);
  if (has(sol, "residual_radius"))
    cfg.residual_radius = static_cast<long>(to_count("residual_radius", sol["residual_radius"], 0));

  auto& out = sections["output"];
  if (has(out, "directory")) cfg.out_dir = out["directory"].value;
  if (has(out, "formats")) {
    cfg.formats = split_list(out["formats"].value);
    for (const auto& f : cfg.formats)
      if (f != "csv" && f != "svg") throw ConfigError("formats may contain csv and svg");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), dir.empty() ? "." : dir);
}

void scale_tolerances(RunConfig& cfg, double factor) {
  if (!(factor > 0)) throw ConfigError("tol-scale must be positive");
  auto& T = cfg.tols;
  T.tol_inner *= factor;
  T.tol_outer *= factor;
  T.eig_tol *= factor;
  T.speed_tol *= factor;
  T.tol_limit *= factor;
}

MediumSpec build_medium(const RunConfig& cfg) {
  MediumSpec m;
  if (!cfg.grid_file.empty()) {
    auto p = std::filesystem::path(cfg.grid_file);
    if (p.is_relative()) p = std::filesystem::path(cfg.base_dir) / p;
    m = load_gridded_medium(p.string(), cfg.dimension);
  } else {
    const std::size_t n = cfg.dimension;
    m.dimension = n;
    try {
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i; j <= n; ++j) {
          std::string key = "a" + std::to_string(i) + std::to_string(j);
          auto it = cfg.diffusion.find(key);
          if (it == cfg.diffusion.end()) m.diffusion.push_back(ScalarField::constant(n, i == j ? 1.0 : 0.0));
          else m.diffusion.push_back(TrigPolynomial::parse(it->second, n));
        }
      m.growth = TrigPolynomial::parse(cfg.growth, n);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("coefficient expression: ") + e.what());
    }
  }
  m.family = cfg.family;
  m.exponent = cfg.exponent;
  m.theta = cfg.theta;
  m.holder_alpha = cfg.holder_alpha;
  m.name = cfg.name;
  return m;
}

std::vector<double> real_direction(const RunConfig& cfg) {
  const std::size_t n = cfg.dimension;
  std::vector<double> e(n, 0.0);
  if (cfg.angle) {
    e = {std::cos(*cfg.angle), std::sin(*cfg.angle)};
  } else if (cfg.angles) {
    auto [p, a] = *cfg.angles;
    e = {std::sin(p) * std::cos(a), std::sin(p) * std::sin(a), std::cos(p)};
  } else if (!cfg.vector.empty()) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = parse_rational(cfg.vector[i]).get_d();
      s += e[i] * e[i];
    }
    if (!(s > 0)) throw ConfigError("direction vector is zero");
    for (double& v : e) v /= std::sqrt(s);
  } else {
    e[0] = 1;
  }
  return e;
}

RationalDirection build_direction(const RunConfig& cfg) {
  const std::size_t n = cfg.dimension;
  if (!cfg.vector.empty()) {
    std::vector<Rational> q;
    for (const auto& s : cfg.vector) q.push_back(parse_rational(s));
    Rational norm = 0;
    for (const auto& v : q) norm += v * v;
    if (norm == 1) return RationalDirection(q);
  } else if (!cfg.angle && !cfg.angles) {
    return RationalDirection::axis(n, 0);
  }
  auto e = real_direction(cfg);
  double tol = cfg.angle_tols.empty() ? 1e-6 : cfg.angle_tols.back();
  return rationalize_direction(e, tol, cfg.max_denominator);
}

StripResolution build_resolution(const RunConfig& cfg) {
  StripResolution r;
  r.n_xi = cfg.n_xi;
  r.n_t = cfg.n_t;
  r.n_y = cfg.n_y;
  r.torus = TorusGrid(cfg.dimension, cfg.torus_n);
  return r;
}

MediumSpec load_gridded_medium(const std::string& path, std::size_t dimension) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read grid file '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw ConfigError("grid file is empty");
  auto head = split_list(line);
  if (head.empty() || head[0] != "shape" || head.size() != dimension + 1)
    throw ConfigError("grid file must start with 'shape,n1,...,nN'");
  std::vector<std::size_t> shape;
  std::size_t total = 1;
  for (std::size_t i = 1; i < head.size(); ++i) {
    shape.push_back(to_count("shape", {head[i], 1}, 2));
    total *= shape.back();
  }
  if (!std::getline(f, line)) throw ConfigError("grid file lacks a column header");
  auto cols = split_list(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cols.size(); ++i) index[cols[i]] = i;
  if (!index.count("r")) throw ConfigError("grid file needs an r column");
  std::vector<std::vector<double>> data(cols.size());
  std::size_t rows = 0;
  int lineno = 2;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_list(line);
    if (cells.size() != cols.size()) throw ConfigError("grid file line " + std::to_string(lineno) + ": wrong column count");
    for (std::size_t i = 0; i < cells.size(); ++i) data[i].push_back(to_double(cols[i], {cells[i], lineno}));
    ++rows;
  }
  if (rows != total) throw ConfigError("grid file has " + std::to_string(rows) + " rows, shape needs " + std::to_string(total));
  MediumSpec m;
  m.dimension = dimension;
  for (std::size_t i = 1; i <= dimension; ++i)
    for (std::size_t j = i; j <= dimension; ++j) {
      std::string key = "a" + std::to_string(i) + std::to_string(j);
      if (index.count(key)) m.diffusion.push_back(GriddedField(shape, data[index[key]]));
      else m.diffusion.push_back(ScalarField::constant(dimension, i == j ? 1.0 : 0.0));
    }
  m.growth = GriddedField(shape, data[index["r"]]);
  m.name = std::filesystem::path(path).stem().string();
  return m;
}

}  // namespace kppfront
