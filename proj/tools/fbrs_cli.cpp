#include <cmath>
#include <limits>
#include <thread>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fbrs/fbrs.hpp"
#include "fbrs/io.hpp"

namespace {

using fbrs::io::Json;

enum ExitCode { kOk = 0, kConfig = 2, kPhysics = 3, kNumerical = 4 };

struct RunConfig {
  std::string potential = "kepler";
  double energy = std::numeric_limits<double>::quiet_NaN();
  double angmom = 1.0;
  int periods = 3;
  double step_tol = 1e-12;
  double quad_tol = 1e-10;
  std::string gamma = "auto";
  double phi_offset = std::numbers::pi / 2;
  std::string out;
  std::string format = "json";
  bool apocenter_start = false;
};

struct BertrandConfig {
  double p_min = -1.5;
  double p_max = 3.0;
  int steps = 10;
  std::vector<double> p_list;
  std::vector<double> levels{0.05, 0.25};
  unsigned workers = 0;
  std::string format = "csv";
};

void add_orbit_flags(CLI::App* sub, RunConfig& cfg, bool energy_required) {
  sub->add_option("--potential", cfg.potential, "kepler | hooke:omega=<w> | powerlaw:p=<p> | log")
      ->capture_default_str();
  auto* e = sub->add_option("--energy", cfg.energy, "orbit energy E");
  if (energy_required) e->required();
  sub->add_option("--angmom", cfg.angmom, "angular momentum L")->capture_default_str();
  sub->add_option("--quad-tol", cfg.quad_tol, "absolute quadrature tolerance")->capture_default_str();
  sub->add_option("--out", cfg.out, "output file (default stdout)");
  sub->add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void add_dynamics_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--periods", cfg.periods, "radial periods to integrate")->capture_default_str();
  sub->add_option("--step-tol", cfg.step_tol, "integrator tolerance")->capture_default_str();
  sub->add_flag("--apocenter-start", cfg.apocenter_start, "start the orbit at the apocenter");
}

void add_fbrs_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--gamma", cfg.gamma, "amplitude, or auto (-e for Kepler, 1 otherwise)")->capture_default_str();
  sub->add_option("--phi-offset", cfg.phi_offset, "phase offset phi")->capture_default_str();
}

fbrs::OrbitParams orbit_from(const RunConfig& cfg) {
  return fbrs::OrbitParams(fbrs::parse_potential(cfg.potential), cfg.energy, cfg.angmom);
}

fbrs::QuadratureConfig quadrature_from(const RunConfig& cfg) {
  if (!(cfg.quad_tol > 0.0)) throw fbrs::Error(fbrs::Errc::InvalidParameter, "--quad-tol must be positive");
  return {cfg.quad_tol, 16};
}

fbrs::FbrsParams fbrs_params_from(const RunConfig& cfg, const fbrs::OrbitParams& orbit) {
  const double gamma = cfg.gamma == "auto" ? fbrs::auto_gamma(orbit)
                                           : fbrs::detail::parse_double_token(cfg.gamma, "--gamma");
  return fbrs::FbrsParams::make(gamma, cfg.phi_offset);
}

fbrs::IntegrationOptions integration_from(const RunConfig& cfg) {
  fbrs::IntegrationOptions opts;
  opts.step_tol = cfg.step_tol;
  opts.start_at_apocenter = cfg.apocenter_start;
  opts.quadrature = quadrature_from(cfg);
  return opts;
}

/// Writes to --out when given, otherwise to stdout.
template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw fbrs::Error(fbrs::Errc::InvalidParameter, "cannot open output file '" + path + "'");
  write(file);
}

void print_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

int exit_code_for(const fbrs::Error& e) {
  switch (e.category()) {
    case fbrs::ErrorCategory::Configuration: return kConfig;
    case fbrs::ErrorCategory::Physics: return kPhysics;
    case fbrs::ErrorCategory::Numerical: return kNumerical;
  }
  return kNumerical;
}

int cmd_turning(const RunConfig& cfg) {
  const auto orbit = orbit_from(cfg);
  const auto cls = fbrs::classify_orbit(orbit);
  if (cls != fbrs::OrbitClass::Bounded) {
    const auto code = cls == fbrs::OrbitClass::Circular ? fbrs::Errc::CircularDegenerate : fbrs::Errc::NotBounded;
    Json j{{"error", fbrs::errc_name(code)}, {"class", fbrs::to_string(cls)}};
    print_json(std::cout, j);
    return kPhysics;
  }
  const auto tp = fbrs::find_turning_points(orbit);
  emit(cfg.out, [&](std::ostream& os) {
    if (cfg.format == "csv") {
      os << "r_min,r_max,class\n"
         << fbrs::detail::shortest(tp.r_min) << ',' << fbrs::detail::shortest(tp.r_max) << ",bounded\n";
    } else {
      print_json(os, fbrs::io::turning_report(tp));
    }
  });
  return kOk;
}

int cmd_apsidal(const RunConfig& cfg) {
  const auto res = fbrs::apsidal_angle(orbit_from(cfg), quadrature_from(cfg));
  emit(cfg.out, [&](std::ostream& os) {
    if (cfg.format == "csv") {
      os << "phi,err,evals\n"
         << fbrs::detail::shortest(res.phi) << ',' << fbrs::detail::shortest(res.err_estimate) << ','
         << res.evaluations << '\n';
    } else {
      print_json(os, fbrs::io::apsidal_report(res));
    }
  });
  return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto traj = fbrs::integrate_orbit(orbit_from(cfg), cfg.periods, integration_from(cfg));
  if (cfg.format == "csv") {
    emit(cfg.out, [&](std::ostream& os) { fbrs::io::write_trajectory_csv(os, traj); });
  } else {
    if (!cfg.out.empty()) emit(cfg.out, [&](std::ostream& os) { fbrs::io::write_trajectory_csv(os, traj); });
    print_json(std::cout, fbrs::io::conservation_report(traj));
  }
  return kOk;
}

int cmd_fbrs(const RunConfig& cfg) {
  const auto orbit = orbit_from(cfg);
  const auto params = fbrs_params_from(cfg, orbit);
  const auto traj = fbrs::integrate_orbit(orbit, cfg.periods, integration_from(cfg));
  const auto trace = fbrs::trace_fbrs(traj, params, quadrature_from(cfg));
  if (cfg.format == "csv") {
    emit(cfg.out, [&](std::ostream& os) { fbrs::io::write_fbrs_csv(os, trace); });
  } else {
    if (!cfg.out.empty()) emit(cfg.out, [&](std::ostream& os) { fbrs::io::write_fbrs_csv(os, trace); });
    print_json(std::cout, fbrs::io::jump_report(trace));
  }
  return kOk;
}

struct NamedOrbit {
  std::string name;
  fbrs::OrbitParams params;
};

std::vector<NamedOrbit> default_verify_orbits() {
  return {
      {"kepler", fbrs::OrbitParams(fbrs::Potential::kepler(), -0.375, 1.0)},
      {"hooke:omega=1", fbrs::OrbitParams(fbrs::Potential::hooke(1.0), 1.25, 1.0)},
      {"log", fbrs::OrbitParams(fbrs::Potential::logarithmic(), 1.0, 1.0)},
      {"powerlaw:p=3", fbrs::orbit_at_depth(fbrs::Potential::power_law(3.0), 1.0, 0.3)},
      {"powerlaw:p=-1.5", fbrs::orbit_at_depth(fbrs::Potential::power_law(-1.5), 1.0, 0.3)},
  };
}

int cmd_verify(const RunConfig& cfg, bool explicit_orbit) {
  std::vector<NamedOrbit> orbits;
  if (explicit_orbit) {
    orbits.push_back({cfg.potential, orbit_from(cfg)});
  } else {
    orbits = default_verify_orbits();
  }
  Json report = Json::array();
  bool all = true;
  for (const auto& o : orbits) {
    fbrs::VerifyOptions vo;
    vo.n_periods = cfg.periods;
    vo.step_tol = cfg.step_tol;
    vo.quadrature = quadrature_from(cfg);
    vo.fbrs = fbrs_params_from(cfg, o.params);
    Json checks = Json::array();
    for (const auto& c : fbrs::verify_orbit(o.params, vo)) {
      all = all && c.passed;
      checks.push_back(Json{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
    }
    report.push_back(Json{{"potential", o.params.potential().to_string()},
                          {"E", o.params.energy()},
                          {"L", o.params.angmom()},
                          {"checks", std::move(checks)}});
  }
  emit(cfg.out, [&](std::ostream& os) { print_json(os, Json{{"passed", all}, {"orbits", std::move(report)}}); });
  return all ? kOk : kNumerical;
}

int cmd_bertrand(const RunConfig& cfg, const BertrandConfig& bc) {
  std::vector<double> exponents = bc.p_list.empty() ? fbrs::exponent_grid(bc.p_min, bc.p_max, bc.steps) : bc.p_list;
  for (const double p : exponents) {
    if (!(p > -2.0)) throw fbrs::Error(fbrs::Errc::InvalidParameter, "exponent must exceed -2");
  }
  const unsigned workers = bc.workers == 0 ? std::thread::hardware_concurrency() : bc.workers;
  const auto cells = fbrs::bertrand_sweep(exponents, bc.levels, cfg.angmom, quadrature_from(cfg), workers);
  emit(cfg.out, [&](std::ostream& os) {
    if (bc.format == "json") {
      Json rows = Json::array();
      for (const auto& c : cells) {
        Json row{{"p", c.p}, {"level", c.level}, {"E", c.energy}, {"L", c.angmom}};
        if (c.error.empty()) {
          row["ecc"] = c.eccentricity;
          row["phi"] = c.phi;
        } else {
          row["error"] = c.error;
        }
        rows.push_back(std::move(row));
      }
      print_json(os, rows);
    } else {
      fbrs::io::write_bertrand_csv(os, cells);
    }
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-conserved perihelion vectors for central potentials"};
  app.require_subcommand(1);

  RunConfig cfg;
  BertrandConfig bc;

  auto* turning = app.add_subcommand("turning", "turning points and orbit class");
  add_orbit_flags(turning, cfg, true);

  auto* apsidal = app.add_subcommand("apsidal", "apsidal angle by quadrature");
  add_orbit_flags(apsidal, cfg, true);

  auto* simulate = app.add_subcommand("simulate", "integrate the orbit; trajectory CSV and conservation JSON");
  add_orbit_flags(simulate, cfg, true);
  add_dynamics_flags(simulate, cfg);

  auto* fbrs_cmd = app.add_subcommand("fbrs", "FBRS vector trace CSV and jump JSON");
  add_orbit_flags(fbrs_cmd, cfg, true);
  add_dynamics_flags(fbrs_cmd, cfg);
  add_fbrs_flags(fbrs_cmd, cfg);

  auto* verify = app.add_subcommand("verify", "run the invariant checks; pass/fail JSON");
  add_orbit_flags(verify, cfg, false);
  add_dynamics_flags(verify, cfg);
  add_fbrs_flags(verify, cfg);

  auto* bertrand = app.add_subcommand("bertrand", "apsidal angle over power-law exponents and depths");
  bertrand->add_option("--angmom", cfg.angmom, "angular momentum L")->capture_default_str();
  bertrand->add_option("--quad-tol", cfg.quad_tol, "absolute quadrature tolerance")->capture_default_str();
  bertrand->add_option("--out", cfg.out, "output file (default stdout)");
  bertrand->add_option("--format", bc.format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  bertrand->add_option("--p-min", bc.p_min, "smallest exponent")->capture_default_str();
  bertrand->add_option("--p-max", bc.p_max, "largest exponent")->capture_default_str();
  bertrand->add_option("--steps", bc.steps, "number of exponents")->capture_default_str();
  bertrand->add_option("--p-list", bc.p_list, "explicit exponents (overrides the grid)")->delimiter(',');
  bertrand->add_option("--levels", bc.levels, "pericenter depths in (0, 1)")->delimiter(',')->capture_default_str();
  bertrand->add_option("--workers", bc.workers, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (turning->parsed()) return cmd_turning(cfg);
    if (apsidal->parsed()) return cmd_apsidal(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (fbrs_cmd->parsed()) return cmd_fbrs(cfg);
    if (verify->parsed()) return cmd_verify(cfg, (*verify)["--energy"]->count() > 0);
    if (bertrand->parsed()) return cmd_bertrand(cfg, bc);
  } catch (const fbrs::Error& e) {
    print_json(std::cout, fbrs::io::error_report(e));
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}
