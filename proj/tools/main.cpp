#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kppfront/config.hpp"
#include "kppfront/errors.hpp"
#include "kppfront/front.hpp"
#include "kppfront/io.hpp"
#include "kppfront/medium.hpp"
#include "kppfront/reconstruct.hpp"
#include "kppfront/spectral.hpp"
#include "kppfront/wavespeed.hpp"

using namespace kppfront;

namespace {

enum Exit { kOk = 0, kHypothesis = 2, kSolver = 3, kConfig = 4 };

struct Options {
  std::string config;
  std::string out;
  std::size_t threads = 1;
  std::size_t seed = 0;
  double tol_scale = 1;
};

struct Run {
  RunConfig cfg;
  MediumSpec spec;
  std::string out;
  Options opt;
  Manifest manifest;

  explicit Run(const Options& o, const std::string& command) : opt(o) {
    cfg = load_config(o.config);
    if (o.tol_scale != 1) scale_tolerances(cfg, o.tol_scale);
    cfg.tols.threads = o.threads;
    out = o.out.empty() ? cfg.out_dir : o.out;
    spec = build_medium(cfg);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(cfg.text));
    manifest.add("command", command);
    manifest.add("config", o.config);
    manifest.add("config_fnv1a64", hash);
    manifest.add("seed", std::to_string(o.seed));
    manifest.add("threads", std::to_string(o.threads));
    manifest.add("tol_scale", o.tol_scale);
    manifest.add("dimension", std::to_string(cfg.dimension));
    manifest.add("torus_n", std::to_string(cfg.torus_n));
    manifest.add("speed_tol", cfg.tols.speed_tol);
    manifest.add("eig_tol", cfg.tols.eig_tol);
  }

  TorusGrid torus() const { return TorusGrid(cfg.dimension, cfg.torus_n); }

  void require_hypotheses() {
    auto rep = audit_medium(spec);
    manifest.add("hypotheses", rep.passed() ? "passed" : "failed");
    if (!rep.passed()) throw ValidationFailed(rep);
  }

  void finish() { manifest.write(out + "/manifest.txt"); }
};

std::string fmt9(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.9f", v);
  return b;
}

int cmd_validate(const Options& o) {
  Run r(o, "validate");
  auto rep = audit_medium(r.spec);
  std::cout << rep.summary();
  nlohmann::ordered_json j;
  j["passed"] = rep.passed();
  j["elliptic_ok"] = rep.elliptic_ok;
  j["symmetric_ok"] = rep.symmetric_ok;
  j["kpp_ok"] = rep.kpp_ok;
  j["zeros_ok"] = rep.zeros_ok;
  j["nonneg_ok"] = rep.nonneg_ok;
  j["monotone_ratio_ok"] = rep.monotone_ratio_ok;
  j["gamma_ell"] = rep.gamma_ell;
  j["Gamma_ell"] = rep.Gamma_ell;
  j["gamma_kpp"] = rep.gamma_kpp;
  j["sup_abs_fu"] = rep.sup_abs_fu;
  j["grid_resolution"] = rep.grid_resolution;
  j["s_samples"] = rep.s_samples;
  auto& w = j["witnesses"] = nlohmann::json::array();
  for (const auto& x : rep.witnesses) w.push_back({{"check", x.check}, {"x", x.x}, {"s", x.s}, {"value", x.value}});
  std::filesystem::create_directories(r.out);
  std::ofstream(r.out + "/validation.json") << j.dump(2) << '\n';
  r.manifest.add("hypotheses", rep.passed() ? "passed" : "failed");
  r.finish();
  return rep.passed() ? kOk : kHypothesis;
}

int cmd_basis(const Options& o) {
  Run r(o, "basis");
  RationalDirection z = build_direction(r.cfg);
  auto F = orthogonal_basis(z);
  auto L = lattice_periods(F);
  std::ostringstream os;
  os << "zeta =";
  for (const auto& q : z.coords()) os << ' ' << to_string(q);
  os << "\nangle_to_input = " << format_double(angle_between(z, real_direction(r.cfg))) << '\n';
  for (std::size_t i = 0; i < F.dimension; ++i) {
    os << "basis_" << i + 1 << " =";
    for (const auto& q : F.basis[i]) os << ' ' << to_string(q);
    os << "\n  g = " << to_string(L.gcds[i]) << "\n  |v|^2 = " << to_string(F.norms_squared[i])
       << "\n  tau = " << to_string(L.periods[i].coefficient) << " * sqrt(" << to_string(L.periods[i].radicand)
       << ") = " << format_double(L.periods[i].value()) << "\n  tau_closed_form = "
       << to_string(L.closed_form_periods[i].coefficient) << " * sqrt("
       << to_string(L.closed_form_periods[i].radicand) << "), quotient = " << L.closed_form_quotients[i].get_str()
       << "\n  cell_period = " << format_double(L.cell_periods[i].value()) << '\n';
  }
  os << "time_period_times_c = " << to_string(L.gcds[0]) << '\n';
  os << "twist =";
  for (const auto& t : L.twist) os << ' ' << to_string(t);
  os << '\n';
  std::cout << os.str();
  std::filesystem::create_directories(r.out);
  std::ofstream(r.out + "/basis.txt") << os.str();
  r.finish();
  return kOk;
}

int cmd_eig(const Options& o) {
  Run r(o, "eig");
  r.require_hypotheses();
  auto e = real_direction(r.cfg);
  std::vector<double> lambdas = r.cfg.lambdas;
  if (lambdas.empty())
    for (int i = 0; i <= 16; ++i) lambdas.push_back(0.25 * i);
  auto rep = dispersion_curve(r.spec, e, lambdas, r.torus(), r.cfg.tols.eig_tol);
  std::vector<std::vector<double>> rows;
  for (const auto& s : rep.samples) {
    rows.push_back({s.lambda, s.k, s.ratio});
    std::cout << "lambda=" << fmt9(s.lambda) << " k=" << fmt9(s.k) << '\n';
  }
  std::cout << "convexity_violation=" << format_double(rep.convexity_violation) << '\n';
  write_csv(r.out + "/eig.csv", {"lambda", "k", "k_over_lambda"}, rows);
  r.manifest.add("convexity_violation", rep.convexity_violation);
  r.finish();
  return kOk;
}

int cmd_speed(const Options& o) {
  Run r(o, "speed");
  r.require_hypotheses();
  auto e = real_direction(r.cfg);
  auto s = minimal_speed(r.spec, e, r.torus(), r.cfg.tols.speed_tol);
  std::cout << "c_star=" << fmt9(s.c_star) << " lambda_star=" << fmt9(s.lambda_star) << '\n';
  r.manifest.add("c_star", s.c_star);
  r.manifest.add("lambda_star", s.lambda_star);
  r.manifest.add_count("eigen_evaluations", s.evaluations);
  double c = r.cfg.c ? *r.cfg.c : r.cfg.c_offset ? s.c_star + *r.cfg.c_offset : r.cfg.eps_rel ? (1 + *r.cfg.eps_rel) * s.c_star : 0;
  if (c > 0) {
    auto roots = decay_rates(r.spec, e, c, r.torus(), r.cfg.tols.speed_tol);
    std::cout << "c=" << fmt9(c) << " lambda_minus=" << fmt9(roots.lambda_minus)
              << " lambda_plus=" << fmt9(roots.lambda_plus) << '\n';
    r.manifest.add("c", c);
    r.manifest.add("lambda_minus", roots.lambda_minus);
    r.manifest.add("lambda_plus", roots.lambda_plus);
  }
  r.finish();
  return kOk;
}

int cmd_sweep(const Options& o) {
  Run r(o, "sweep");
  r.require_hypotheses();
  auto t = speed_sweep(r.spec, r.cfg.direction_count, r.torus(), r.cfg.tols.speed_tol, o.threads);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  if (t.dimension == 2) header = {"theta", "e1", "e2", "c_star", "lambda_star"};
  else header = {"polar", "azimuth", "e1", "e2", "e3", "c_star", "lambda_star"};
  std::size_t failed = 0;
  for (const auto& en : t.entries) {
    if (!en.ok) {
      ++failed;
      std::cerr << "direction failed: " << en.error << '\n';
      continue;
    }
    std::vector<double> row = en.angles;
    row.insert(row.end(), en.e.begin(), en.e.end());
    row.push_back(en.c_star);
    row.push_back(en.lambda_star);
    rows.push_back(std::move(row));
  }
  bool csv = std::find(r.cfg.formats.begin(), r.cfg.formats.end(), "csv") != r.cfg.formats.end();
  bool svg = std::find(r.cfg.formats.begin(), r.cfg.formats.end(), "svg") != r.cfg.formats.end();
  if (csv) write_csv(r.out + "/sweep.csv", header, rows);
  if (svg && t.dimension == 2) write_polar_svg(r.out + "/sweep.svg", t);
  std::cout << "directions=" << t.entries.size() << " failed=" << failed
            << " max_adjacent_jump=" << format_double(t.max_adjacent_jump) << '\n';
  r.manifest.add_count("direction_count", t.entries.size());
  r.manifest.add_count("failed", failed);
  r.manifest.add("max_adjacent_jump", t.max_adjacent_jump);
  r.finish();
  return failed ? kSolver : kOk;
}

int cmd_front(const Options& o) {
  Run r(o, "front");
  r.require_hypotheses();
  RationalDirection z = build_direction(r.cfg);
  auto res = build_resolution(r.cfg);
  const auto& T = r.cfg.tols;
  FrontProfile p;
  if (r.cfg.eps_rel) {
    p = near_critical_front(r.spec, z, *r.cfg.eps_rel, r.cfg.a_schedule, res, T);
  } else {
    double c = 0;
    if (r.cfg.c) c = *r.cfg.c;
    else if (r.cfg.c_offset) c = minimal_speed(r.spec, z.to_double(), res.torus, T.speed_tol).c_star + *r.cfg.c_offset;
    else throw ConfigError("front needs one of c, c_offset, eps_rel in [solver]");
    p = front_from_strips(r.spec, z, c, r.cfg.a_schedule, res, T);
  }
  write_profile(r.out, p);
  write_certificates(r.out + "/certificates.txt", p, T);
  std::cout << "c=" << fmt9(p.c) << " c_star=" << fmt9(p.c_star) << " lambda_c=" << fmt9(p.lambda_c)
            << " a_max=" << fmt9(p.grid().a) << " outer_iterations=" << p.strip.outer_iterations << '\n';
  std::cout << "right_end=" << format_double(p.right_end) << " left_end=" << format_double(p.left_end)
            << " tail_slope=" << format_double(p.tail_slope) << " left_tail_bound="
            << (p.certificate.holds ? "holds" : "fails") << '\n';
  auto& m = r.manifest;
  m.add("c", p.c);
  m.add("c_star", p.c_star);
  m.add_count("n_xi", p.grid().n_xi);
  m.add_count("n_t", p.grid().n_t);
  std::string ny;
  for (auto n : p.grid().n_y) ny += (ny.empty() ? "" : ",") + std::to_string(n);
  m.add("n_y", ny.empty() ? "-" : ny);
  m.add("a_max", p.grid().a);
  m.add("tol_inner", T.tol_inner);
  m.add("tol_outer", T.tol_outer);
  m.add_count("inner_sweeps", T.inner_sweeps);
  m.add("scheme", T.scheme == TimeScheme::CrankNicolson ? "crank_nicolson" : "implicit_euler");
  m.add_count("outer_iterations", p.strip.outer_iterations);
  m.add_count("period_sweeps", p.strip.total_sweeps);
  m.add("final_update", p.strip.final_update);
  m.add("contraction", p.strip.contraction);
  r.finish();
  return kOk;
}

int cmd_verify(const Options& o) {
  Run r(o, "verify");
  FrontProfile p = read_profile(r.out, r.spec, r.cfg.tols);
  auto ks = lattice_box(r.cfg.dimension, r.cfg.residual_radius);
  double pulse = pulsating_residual(p, ks, r.cfg.residual_samples, o.seed);
  auto pde = pde_residual(p, 0, r.cfg.residual_samples, o.seed);
  double mono = monotonicity_check(p, r.cfg.residual_samples, o.seed);
  std::ostringstream os;
  os << "pulsating_residual = " << format_double(pulse) << '\n'
     << "interior_pde_residual = " << format_double(pde.interior) << '\n'
     << "profile_eq_residual = " << format_double(pde.profile_eq) << "  # diagnostic only\n"
     << "min_time_derivative = " << format_double(mono) << '\n'
     << "right_end = " << format_double(p.right_end) << '\n'
     << "left_end = " << format_double(p.left_end) << '\n'
     << "tail_slope = " << format_double(p.tail_slope) << " (lambda_c = " << format_double(p.lambda_c) << ")\n"
     << "left_tail_bound_holds = " << (p.certificate.holds ? "true" : "false") << '\n';
  std::cout << os.str();
  std::ofstream(r.out + "/verify.txt") << os.str();
  r.manifest.add("pulsating_residual", pulse);
  r.manifest.add("interior_pde_residual", pde.interior);
  r.manifest.add("min_time_derivative", mono);
  r.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsating KPP fronts in periodic media"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "configuration file")->required();
    sub->add_option("--out", opt.out, "output directory (overrides [output] directory)");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed for quasi-random residual sampling");
    sub->add_option("--tol-scale", opt.tol_scale, "multiply all solver tolerances")->check(CLI::PositiveNumber);
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Cmd cmds[] = {
      {"validate", "audit the medium against the hypotheses", cmd_validate},
      {"basis", "lattice frame and periods of the direction", cmd_basis},
      {"eig", "principal eigenvalue table k(lambda)", cmd_eig},
      {"speed", "minimal speed and decay rates", cmd_speed},
      {"sweep", "minimal speed over directions", cmd_sweep},
      {"front", "compute a pulsating front", cmd_front},
      {"verify", "residual audit of a stored front", cmd_verify},
  };
  std::vector<std::pair<CLI::App*, const Cmd*>> subs;
  for (const auto& c : cmds) {
    auto* s = app.add_subcommand(c.name, c.help);
    add_common(s);
    subs.emplace_back(s, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }
  try {
    for (auto& [s, c] : subs)
      if (s->parsed()) return c->fn(opt);
  } catch (const ValidationFailed& e) {
    std::cerr << "hypothesis validation failed\n" << e.report.summary();
    return kHypothesis;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
