#include "nfbc/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfbc/config.hpp"
#include "nfbc/constants.hpp"
#include "nfbc/csv_io.hpp"
#include "nfbc/errors.hpp"
#include "nfbc/fiber_mode.hpp"
#include "nfbc/oracle.hpp"
#include "nfbc/scenario.hpp"

namespace nfbc {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ScenarioConfig load_effective(const std::string& path) {
  ScenarioConfig cfg = load_config(path);
  if (cfg.scale == "desk") cfg = desk_preset(cfg);
  return cfg;
}

int do_validate(const std::string& path) {
  const ScenarioConfig cfg = load_effective(path);
  const auto violations = validate_all(cfg);
  if (violations.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << v << "\n";
  return 1;
}

void do_run(const std::string& path, const std::string& out_dir, int threads,
            bool dump_fields) {
  const ScenarioConfig cfg = load_effective(path);
  const ScenarioResult r = run_scenario(cfg, out_dir, threads, dump_fields);
  std::cout << "kind " << to_string(cfg.kind) << ", grid " << r.grid_spec.nx << " x "
            << r.grid_spec.ny << " x " << r.grid_spec.nz << ", dt " << brief(r.dt)
            << " s\n";
  std::cout << "steps " << r.stats.steps << ", termination " << r.stats.termination
            << "\n";
  std::cout << "E at particle center " << brief(r.e_center) << " V/m (ex "
            << brief(r.ex_center) << ", ey " << brief(r.ey_center) << ", ez "
            << brief(r.ez_center) << ")\n";
  std::cout << "flux in " << brief(r.flux_in) << " W, flux out " << brief(r.flux_out)
            << " W\n";
  std::cout << "wrote " << r.outputs.size() << " files to " << out_dir << "\n";
}

void do_sweep(const std::string& path, const std::string& out_dir, int threads,
              bool resume) {
  const ScenarioConfig cfg = load_effective(path);
  const SweepResult r = run_sweep(cfg, out_dir, threads, resume);
  if (cfg.sweep.tune_period)
    std::cout << "tuned grating period " << num(r.tuned_period) << " m\n";
  for (const auto& row : r.rows)
    std::cout << "N=" << row.n_per_side << " size=" << brief(row.nd_size * 1e9)
              << "nm E=" << brief(row.e_center) << " V/m power_ratio="
              << brief(row.power_ratio) << "\n";
  std::cout << "wrote sweep.csv (" << r.rows.size() << " rows) to " << out_dir << "\n";
}

void oracle_quasistatic(double index) {
  if (!(index >= 1)) throw ConfigError("--index: must be >= 1");
  std::cout << "index,ratio\n" << num(index) << "," << num(quasi_static_ratio(index))
            << "\n";
}

void oracle_mie(double radius, double index, double wavelength) {
  if (!(radius > 0)) throw ConfigError("--radius: must be > 0");
  if (!(wavelength > 0)) throw ConfigError("--wavelength: must be > 0");
  if (!(index >= 1)) throw ConfigError("--index: must be >= 1");
  const double x = 2.0 * pi * radius / wavelength;
  const MieResult r = mie_internal_ratio(x, index);
  std::cout << "radius_m,index,wavelength_m,size_parameter,ratio,quasistatic_ratio,"
               "terms_used\n";
  std::cout << num(radius) << "," << num(index) << "," << num(wavelength) << ","
            << num(x) << "," << num(r.ratio) << "," << num(quasi_static_ratio(index))
            << "," << r.terms_used << "\n";
}

void oracle_mode(double radius, double index, double clad, double wavelength,
                 double power, const std::string& profile_out, double profile_step,
                 double profile_max) {
  StepFiberSpec spec;
  spec.core_radius = radius;
  spec.n_core = index;
  spec.n_clad = clad;
  spec.wavelength = wavelength;
  const ModeSolution mode = solve_he11(spec, power);
  std::cout << "radius_m,core_index,clad_index,wavelength_m,v_number,n_eff,beta_per_m,"
               "b_over_a,single_mode\n";
  std::cout << num(radius) << "," << num(index) << "," << num(clad) << ","
            << num(wavelength) << "," << num(v_number(spec)) << "," << num(mode.neff)
            << "," << num(mode.beta) << "," << num(mode.b_over_a) << ","
            << (mode.single_mode ? 1 : 0) << "\n";
  if (profile_out.empty()) return;
  if (!(profile_step > 0)) throw ConfigError("--profile-step: must be > 0");
  const double rmax = profile_max > 0 ? profile_max : 3.0 * radius;
  std::vector<std::vector<double>> rows;
  for (double r = 0; r <= rmax + 0.5 * profile_step; r += profile_step) {
    const ModeFields f = mode.fields_at(r, 0.0);
    rows.push_back({r, f.e_mag(), std::abs(f.ex), std::abs(f.ey), std::abs(f.ez)});
  }
  write_csv(profile_out, {"r_m", "e_mag", "ex_mag", "ey_mag", "ez_mag"}, rows);
}

void oracle_tmm(std::size_t pairs, double n_hi, double n_lo, double center,
                bool defect, double lambda_min, double lambda_max,
                std::size_t points) {
  if (!(n_hi >= 1) || !(n_lo >= 1)) throw ConfigError("--n-hi/--n-lo: must be >= 1");
  if (!(center > 0)) throw ConfigError("--center: must be > 0");
  if (!(lambda_min > 0) || !(lambda_max > lambda_min))
    throw ConfigError("--lambda-min/--lambda-max: need 0 < min < max");
  if (points < 2) throw ConfigError("--points: need at least 2");
  TmmStack stack;
  for (std::size_t i = 0; i < pairs; ++i) {
    stack.layers.push_back({n_hi, center / (4.0 * n_hi)});
    stack.layers.push_back({n_lo, center / (4.0 * n_lo)});
  }
  if (defect) {
    stack.layers.push_back({n_lo, center / (2.0 * n_lo)});
    for (std::size_t i = 0; i < pairs; ++i) {
      stack.layers.push_back({n_lo, center / (4.0 * n_lo)});
      stack.layers.push_back({n_hi, center / (4.0 * n_hi)});
    }
  }
  std::vector<double> lams(points);
  for (std::size_t i = 0; i < points; ++i)
    lams[i] = lambda_min + (lambda_max - lambda_min) * double(i) / double(points - 1);
  const auto t = tmm_transmission(stack, lams);
  const auto r = tmm_reflection(stack, lams);
  std::cout << "wavelength_m,transmission,reflection\n";
  for (std::size_t i = 0; i < points; ++i)
    std::cout << num(lams[i]) << "," << num(t[i]) << "," << num(r[i]) << "\n";
}

int dispatch(CLI::App& app, const CLI::App* validate_cmd, const CLI::App* run_cmd,
             const CLI::App* sweep_cmd, const std::string& config_path,
             const std::string& out_dir, int threads, bool dump_fields, bool resume) {
  try {
    if (app.got_subcommand(validate_cmd)) return do_validate(config_path);
    if (app.got_subcommand(run_cmd)) {
      do_run(config_path, out_dir, threads, dump_fields);
      return 0;
    }
    if (app.got_subcommand(sweep_cmd)) {
      do_sweep(config_path, out_dir, threads, resume);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"FDTD toolkit for nanofiber Bragg cavity experiments", "nfbc"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 1;
  bool dump_fields = false, resume = false;

  auto* cmd_validate =
      app.add_subcommand("validate", "parse a config file and check every invariant");
  cmd_validate->add_option("--config", config_path, "configuration file")->required();

  auto* cmd_run = app.add_subcommand("run", "execute one scenario");
  cmd_run->add_option("--config", config_path, "configuration file")->required();
  cmd_run->add_option("--out", out_dir, "output directory")->required();
  cmd_run->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
  cmd_run->add_flag("--dump-fields", dump_fields, "write binary field dumps");

  auto* cmd_sweep =
      app.add_subcommand("sweep", "run the groove-count / particle-size sweep");
  cmd_sweep->add_option("--config", config_path, "configuration file")->required();
  cmd_sweep->add_option("--out", out_dir, "output directory")->required();
  cmd_sweep->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
  cmd_sweep->add_flag("--resume", resume, "skip sweep points that already have results");

  auto* cmd_oracle =
      app.add_subcommand("oracle", "closed-form reference curves, CSV on stdout");
  cmd_oracle->require_subcommand(1);

  double qs_index = 2.417;
  auto* o_qs = cmd_oracle->add_subcommand(
      "quasistatic", "electrostatic internal-field ratio of a dielectric sphere");
  o_qs->add_option("--index", qs_index, "sphere refractive index");

  double mie_radius = 12.5e-9, mie_index = 2.417, mie_lambda = 532e-9;
  auto* o_mie = cmd_oracle->add_subcommand(
      "mie", "exact internal field at a dielectric sphere's center");
  o_mie->add_option("--radius", mie_radius, "sphere radius [m]");
  o_mie->add_option("--index", mie_index, "sphere refractive index");
  o_mie->add_option("--wavelength", mie_lambda, "vacuum wavelength [m]");

  double mode_radius = 150e-9, mode_index = 1.46, mode_clad = 1.0;
  double mode_lambda = 532e-9, mode_power = 1e-3;
  double profile_step = 2.5e-9, profile_max = 0.0;
  std::string profile_out;
  auto* o_mode =
      cmd_oracle->add_subcommand("mode", "exact HE11 mode of a step-index fiber");
  o_mode->add_option("--radius", mode_radius, "core radius [m]");
  o_mode->add_option("--index", mode_index, "core refractive index");
  o_mode->add_option("--clad-index", mode_clad, "cladding refractive index");
  o_mode->add_option("--wavelength", mode_lambda, "vacuum wavelength [m]");
  o_mode->add_option("--power", mode_power, "normalization power [W]");
  o_mode->add_option("--profile-out", profile_out,
                     "also write a radial |E| profile CSV to this path");
  o_mode->add_option("--profile-step", profile_step, "profile sample spacing [m]");
  o_mode->add_option("--profile-max", profile_max,
                     "profile extent [m]; 0 means 3x the radius");

  std::size_t tmm_pairs = 8, tmm_points = 151;
  double tmm_nhi = 1.1347, tmm_nlo = 1.1043, tmm_center = 532e-9;
  double tmm_lmin = 450e-9, tmm_lmax = 750e-9;
  bool tmm_defect = false;
  auto* o_tmm = cmd_oracle->add_subcommand(
      "tmm", "quarter-wave-stack transmission (1D grating surrogate)");
  o_tmm->add_option("--pairs", tmm_pairs, "quarter-wave layer pairs per mirror");
  o_tmm->add_option("--n-hi", tmm_nhi, "high layer index");
  o_tmm->add_option("--n-lo", tmm_nlo, "low layer index");
  o_tmm->add_option("--center", tmm_center, "design wavelength [m]");
  o_tmm->add_flag("--defect", tmm_defect,
                  "insert a half-wave defect layer between two mirrors");
  o_tmm->add_option("--lambda-min", tmm_lmin, "grid start [m]");
  o_tmm->add_option("--lambda-max", tmm_lmax, "grid end [m]");
  o_tmm->add_option("--points", tmm_points, "grid size");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (app.got_subcommand(cmd_oracle)) {
    try {
      if (cmd_oracle->got_subcommand(o_qs)) oracle_quasistatic(qs_index);
      if (cmd_oracle->got_subcommand(o_mie)) oracle_mie(mie_radius, mie_index, mie_lambda);
      if (cmd_oracle->got_subcommand(o_mode))
        oracle_mode(mode_radius, mode_index, mode_clad, mode_lambda, mode_power,
                    profile_out, profile_step, profile_max);
      if (cmd_oracle->got_subcommand(o_tmm))
        oracle_tmm(tmm_pairs, tmm_nhi, tmm_nlo, tmm_center, tmm_defect, tmm_lmin,
                   tmm_lmax, tmm_points);
      return 0;
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    } catch (const IoError& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return 3;
    } catch (const NumericalError& e) {
      std::cerr << "numerical error: " << e.what() << "\n";
      return 2;
    }
  }
  return dispatch(app, cmd_validate, cmd_run, cmd_sweep, config_path, out_dir, threads,
                  dump_fields, resume);
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

} // namespace nfbc
