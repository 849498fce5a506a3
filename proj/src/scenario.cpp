#include "nfbc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <utility>

#include "nfbc/config.hpp"
#include "nfbc/constants.hpp"
#include "nfbc/csv_io.hpp"
#include "nfbc/errors.hpp"
#include "nfbc/field_dump.hpp"
#include "nfbc/manifest.hpp"

namespace nfbc {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Objective: return "objective";
    case ScenarioKind::Fiber: return "fiber";
    case ScenarioKind::Nfbc: return "nfbc";
  }
  return "?";
}

const char* to_string(RunMode m) { return m == RunMode::Cw ? "cw" : "pulsed"; }

std::array<double, 3> nanodiamond_center(const ScenarioConfig& cfg) {
  if (cfg.kind == ScenarioKind::Objective) return {0.0, 0.0, 0.0};
  return {0.0, cfg.fiber.radius + 0.5 * cfg.nanodiamond.size, 0.0};
}

namespace {

double fiber_half_length(const DomainSpec& d) {
  return std::max(std::abs(d.x_min), std::abs(d.x_max)) + 2.0 * d.mesh_step;
}

double grating_span_of(const GratingSpec& gs) {
  if (gs.grooves_per_side == 0) return 0.0;
  return gs.gap + 2.0 * double(gs.grooves_per_side) * gs.period;
}

} // namespace

std::vector<std::string> validate_all(const ScenarioConfig& cfg) {
  std::vector<std::string> v;
  const auto bad = [&v](const std::string& key, const std::string& msg) {
    v.push_back(key + ": " + msg);
  };
  const DomainSpec& d = cfg.domain;
  const double step = d.mesh_step;
  if (!(step > 0)) bad("domain.mesh_step", "must be > 0");
  if (!(d.courant > 0) || d.courant > 1.0) bad("domain.courant", "must lie in (0, 1]");
  if (d.pml_cells < 4) bad("domain.pml_cells", "needs at least 4 cells per face");
  if (d.supersample < 1 || d.supersample > 8) bad("domain.supersample", "must lie in [1, 8]");
  if (step > 0) {
    const double margin = double(d.pml_cells + 6) * step;
    if (d.x_max - d.x_min < 2.0 * margin) bad("domain.x_max", "domain too short for the absorbing layers");
    if (2.0 * d.y_half < 2.0 * margin) bad("domain.y_half", "domain too narrow for the absorbing layers");
    if (2.0 * d.z_half < 2.0 * margin) bad("domain.z_half", "domain too narrow for the absorbing layers");
  }

  if (!(cfg.source.wavelength > 0)) bad("source.wavelength", "must be > 0");
  if (!(cfg.source.power > 0)) bad("source.power", "must be > 0");
  if (!(cfg.source.ramp_cycles >= 1)) bad("source.ramp_cycles", "must be >= 1");
  if (cfg.source.polarization != "y") bad("source.polarization", "only 'y' is supported");

  const std::array<double, 3> nd = nanodiamond_center(cfg);
  const double pml_pad = step > 0 ? double(d.pml_cells + 2) * step : 0.0;

  if (cfg.kind == ScenarioKind::Objective) {
    if (!(cfg.beam.numerical_aperture > 0) || cfg.beam.numerical_aperture > 1)
      bad("beam.numerical_aperture", "must lie in (0, 1]");
    if (!(cfg.beam.beam_diameter > 0)) bad("beam.beam_diameter", "must be > 0");
    if (!(cfg.beam.focus_offset > 0)) bad("beam.focus_offset", "must be > 0");
    const double plane_x = nd[0] - cfg.beam.focus_offset;
    if (step > 0 && plane_x < d.x_min + pml_pad)
      bad("beam.focus_offset", "source plane falls inside the absorbing layer; extend the domain upstream");
    if (step > 0 && nd[0] > d.x_max - pml_pad)
      bad("domain.x_max", "beam focus falls inside the absorbing layer");
  } else {
    if (!(cfg.fiber.radius > 0)) bad("fiber.radius", "must be > 0");
    if (!(cfg.fiber.index > 1)) bad("fiber.index", "must exceed the cladding index 1");
    const double clearance = std::min(d.y_half, d.z_half) - pml_pad;
    if (step > 0 && cfg.fiber.radius > clearance)
      bad("fiber.radius", "fiber surface reaches the transverse absorbing layer; widen y_half/z_half");
  }

  if (cfg.kind == ScenarioKind::Nfbc) {
    const GratingSpec& gs = cfg.grating;
    if (!(gs.period > 0)) bad("grating.period", "must be > 0");
    const double rg = gs.groove_radius > 0 ? gs.groove_radius : gs.period / 4.0;
    if (gs.groove_radius < 0) bad("grating.groove_radius", "must be >= 0 (0 means period/4)");
    if (gs.period > 0 && 2.0 * rg > gs.period)
      bad("grating.groove_radius", "grooves overlap: 2*groove_radius exceeds the period");
    if (!(gs.depth > 0) || gs.depth >= cfg.fiber.radius)
      bad("grating.depth", "must lie in (0, fiber.radius)");
    if (gs.gap < 0) bad("grating.gap", "must be >= 0");
    const double span = grating_span_of(gs);
    if (span + 2.0 * step > d.x_max - d.x_min)
      bad("grating.n_per_side", "grating span " + std::to_string(span) +
                                    " m does not fit the fiber length " +
                                    std::to_string(d.x_max - d.x_min) + " m");
    if (cfg.sweep.reference_field < 0) bad("sweep.reference_field", "must be >= 0");
    for (double s : cfg.sweep.sizes)
      if (!(s > 0)) bad("sweep.sizes", "every size must be > 0");
  }

  const NanodiamondSpec& nds = cfg.nanodiamond;
  if (nds.enabled) {
    if (!(nds.size > 0)) bad("nanodiamond.size", "must be > 0");
    if (!(nds.index >= 1)) bad("nanodiamond.index", "must be >= 1");
    if (nds.shape == NdKind::Polyhedron && nds.vertices < 4)
      bad("nanodiamond.vertices", "a polyhedron needs at least 4 vertices");
    if (step > 0 && nds.size > 0) {
      const double r = 0.5 * nds.size;
      if (nd[0] - r < d.x_min + pml_pad || nd[0] + r > d.x_max - pml_pad ||
          nd[1] + r > d.y_half - pml_pad || nd[2] + r > d.z_half - pml_pad)
        bad("nanodiamond.size", "particle does not fit inside the interior (non-absorbing) region");
    }
  }

  const RunSpec& r = cfg.run;
  if (!(r.max_time > 0)) bad("run.max_time", "must be > 0");
  if (r.mode == RunMode::Cw) {
    if (!(r.measure_cycles >= 1)) bad("run.measure_cycles", "must be >= 1");
    const double ramp = cfg.source.ramp_cycles * cfg.source.wavelength / c0;
    if (r.max_time > 0 && r.max_time <= ramp)
      bad("run.max_time", "must exceed the source ramp time");
  } else {
    if (!(r.pulse_lambda_min > 0) || !(r.pulse_lambda_max > r.pulse_lambda_min))
      bad("run.pulse_lambda_min", "need 0 < pulse_lambda_min < pulse_lambda_max");
    if (r.pulse_count < 2) bad("run.pulse_count", "need at least 2 spectral points");
    if (!(r.pulse_sigma > 0)) bad("run.pulse_sigma", "must be > 0");
    if (r.sample_stride < 1) bad("run.sample_stride", "must be >= 1");
  }
  return v;
}

void validate(const ScenarioConfig& cfg) {
  const auto v = validate_all(cfg);
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ConfigError(msg);
}

ScenarioConfig desk_preset(const ScenarioConfig& in) {
  ScenarioConfig c = in;
  c.scale = "desk";
  switch (c.kind) {
    case ScenarioKind::Objective: {
      c.domain.mesh_step = std::max(c.domain.mesh_step, 20e-9);
      c.domain.x_min = std::max(c.domain.x_min, -3.5e-6);
      c.domain.x_max = std::min(c.domain.x_max, 0.8e-6);
      c.domain.y_half = std::min(c.domain.y_half, 3.5e-6);
      c.domain.z_half = std::min(c.domain.z_half, 3.0e-6);
      c.run.max_time = std::min(c.run.max_time > 0 ? c.run.max_time : 4e-13, 4e-13);
      break;
    }
    case ScenarioKind::Fiber: {
      c.domain.mesh_step = std::max(c.domain.mesh_step, 20e-9);
      c.domain.x_min = std::max(c.domain.x_min, -10e-6);
      c.domain.x_max = std::min(c.domain.x_max, 10e-6);
      c.domain.y_half = std::min(c.domain.y_half, 0.75e-6);
      c.domain.z_half = std::min(c.domain.z_half, 0.75e-6);
      c.run.max_time = std::min(c.run.max_time > 0 ? c.run.max_time : 6e-13, 6e-13);
      break;
    }
    case ScenarioKind::Nfbc: {
      c.domain.mesh_step = std::max(c.domain.mesh_step, 25e-9);
      c.grating.grooves_per_side = std::min<std::size_t>(c.grating.grooves_per_side, 80);
      // the grating must still fit: grow the fiber beyond the 20 um clamp
      // when the milled span plus launch/exit margins demands it
      const double len = std::max(20e-6, grating_span_of(c.grating) + 3e-6);
      c.domain.x_min = std::max(c.domain.x_min, -0.5 * len);
      c.domain.x_max = std::min(c.domain.x_max, 0.5 * len);
      c.domain.y_half = std::min(c.domain.y_half, 0.875e-6);
      c.domain.z_half = std::min(c.domain.z_half, 0.875e-6);
      const double cap = c.run.mode == RunMode::Cw ? 1.2e-12 : 1.5e-12;
      c.run.max_time = std::min(c.run.max_time > 0 ? c.run.max_time : cap, cap);
      break;
    }
  }
  return c;
}

namespace {

std::size_t clamp_cell(long long v, std::size_t lo, std::size_t hi) {
  if (v < static_cast<long long>(lo)) return lo;
  if (v > static_cast<long long>(hi)) return hi;
  return static_cast<std::size_t>(v);
}

std::vector<double> monitor_wavelengths(const ScenarioConfig& cfg) {
  if (cfg.run.mode == RunMode::Cw) return {cfg.source.wavelength};
  std::vector<double> wl(cfg.run.pulse_count);
  const double a = cfg.run.pulse_lambda_min, b = cfg.run.pulse_lambda_max;
  for (std::size_t i = 0; i < wl.size(); ++i)
    wl[i] = a + (b - a) * double(i) / double(wl.size() - 1);
  return wl;
}

TimeEnvelope make_envelope(const ScenarioConfig& cfg) {
  TimeEnvelope env;
  if (cfg.run.mode == RunMode::Cw) {
    env.kind = TimeEnvelope::Kind::RampedCw;
    env.carrier_wavelength = cfg.source.wavelength;
    env.ramp_cycles = cfg.source.ramp_cycles;
  } else {
    env.kind = TimeEnvelope::Kind::GaussianPulse;
    // carrier at the center frequency of the requested band
    env.carrier_wavelength =
        2.0 * cfg.run.pulse_lambda_min * cfg.run.pulse_lambda_max /
        (cfg.run.pulse_lambda_min + cfg.run.pulse_lambda_max);
    env.pulse_sigma = cfg.run.pulse_sigma;
    env.pulse_center = 6.0 * cfg.run.pulse_sigma;
  }
  return env;
}

std::size_t nearest_index(const std::vector<double>& wl, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < wl.size(); ++i)
    if (std::abs(wl[i] - target) < std::abs(wl[best] - target)) best = i;
  return best;
}

} // namespace

BuiltScenario build(const ScenarioConfig& cfg) {
  validate(cfg);
  BuiltScenario b;
  b.cfg = cfg;

  const DomainSpec& d = cfg.domain;
  GridSpec spec;
  spec.nx = static_cast<std::size_t>(std::llround((d.x_max - d.x_min) / d.mesh_step));
  spec.ny = static_cast<std::size_t>(std::llround(2.0 * d.y_half / d.mesh_step));
  spec.nz = static_cast<std::size_t>(std::llround(2.0 * d.z_half / d.mesh_step));
  spec.dx = spec.dy = spec.dz = d.mesh_step;
  spec.origin_x = d.x_min;
  spec.origin_y = -d.y_half;
  spec.origin_z = -d.z_half;
  spec.courant_factor = d.courant;

  // material stack
  b.scene.background_eps = 1.0;
  if (cfg.kind != ScenarioKind::Objective) {
    GratingSpec gs = cfg.grating;
    if (cfg.kind == ScenarioKind::Fiber) {
      gs = GratingSpec{};
      gs.grooves_per_side = 0;
    }
    b.scene.items.push_back(
        {build_nfbc_shapes(cfg.fiber.radius, fiber_half_length(d), gs),
         cfg.fiber.index * cfg.fiber.index});
  }
  const std::array<double, 3> nd = nanodiamond_center(cfg);
  if (cfg.nanodiamond.enabled) {
    b.scene.items.push_back(
        {build_nanodiamond(cfg.nanodiamond.size, cfg.nanodiamond.shape,
                           cfg.nanodiamond.seed, cfg.nanodiamond.vertices, nd[0], nd[1],
                           nd[2]),
         cfg.nanodiamond.index * cfg.nanodiamond.index});
  }

  b.grid = std::make_unique<YeeGrid>(spec);
  rasterize(b.scene, *b.grid, d.supersample);

  CpmlSpec ps;
  ps.thickness = d.pml_cells;
  b.pml = make_cpml(spec, ps);

  // temporal sampling of the monitors must resolve the shortest wavelength
  if (cfg.run.mode == RunMode::Pulsed) {
    const double min_period = cfg.run.pulse_lambda_min / c0;
    if (double(cfg.run.sample_stride) * b.grid->dt > min_period / 4.0)
      throw ConfigError("run.sample_stride: undersamples the shortest requested wavelength");
  }

  const TimeEnvelope env = make_envelope(cfg);
  if (cfg.kind == ScenarioKind::Objective) {
    const double plane_x = nd[0] - cfg.beam.focus_offset;
    const auto plane = static_cast<std::size_t>(std::llround((plane_x - d.x_min) / d.mesh_step));
    b.port_plane = plane;
    b.port = std::make_unique<PlaneWavePort>(make_gaussian_beam(
        *b.grid, plane, env, cfg.source.power, 0.5 * cfg.beam.beam_diameter,
        cfg.beam.focus_offset, nd[1], nd[2]));
  } else {
    b.port_plane = d.pml_cells + 2;
    StepFiberSpec fs;
    fs.core_radius = cfg.fiber.radius;
    fs.n_core = cfg.fiber.index;
    fs.n_clad = 1.0;
    fs.wavelength = env.carrier_wavelength;
    b.mode = solve_he11(fs, cfg.source.power);
    b.port = std::make_unique<PlaneWavePort>(
        make_mode_port(*b.mode, *b.grid, b.port_plane, cfg.source.power, env));
  }

  // cell whose center is nearest the particle
  const auto cell_of = [&](double w, double org, std::size_t n) {
    return clamp_cell(std::llround((w - org) / d.mesh_step - 0.5), 0, n - 1);
  };
  b.nd_cell = {cell_of(nd[0], spec.origin_x, spec.nx),
               cell_of(nd[1], spec.origin_y, spec.ny),
               cell_of(nd[2], spec.origin_z, spec.nz)};

  b.wavelengths = monitor_wavelengths(cfg);

  const std::size_t p = d.pml_cells;
  const std::array<std::size_t, 3> ilo{p + 1, p + 1, p + 1};
  const std::array<std::size_t, 3> ihi{spec.nx - p - 1, spec.ny - p - 1, spec.nz - p - 1};
  const auto box_around = [&](std::size_t c, std::size_t axis, std::size_t half) {
    const std::size_t lo = c > ilo[axis] + half ? c - half : ilo[axis];
    const std::size_t hi = std::min(c + half + 1, ihi[axis]);
    return std::pair<std::size_t, std::size_t>(lo, hi);
  };
  const std::size_t half = cfg.run.mode == RunMode::Cw ? 6 : 3;
  const auto bx = box_around(b.nd_cell[0], 0, half);
  const auto by = box_around(b.nd_cell[1], 1, half);
  const auto bz = box_around(b.nd_cell[2], 2, half);
  if (cfg.run.mode == RunMode::Cw) {
    b.dft_x = std::make_unique<DftVolumeMonitor>(
        spec, std::array<std::size_t, 3>{ilo[0], by.first, bz.first},
        std::array<std::size_t, 3>{ihi[0], by.second, bz.second}, b.wavelengths);
    b.dft_y = std::make_unique<DftVolumeMonitor>(
        spec, std::array<std::size_t, 3>{bx.first, ilo[1], bz.first},
        std::array<std::size_t, 3>{bx.second, ihi[1], bz.second}, b.wavelengths);
  } else {
    b.dft_x = std::make_unique<DftVolumeMonitor>(
        spec, std::array<std::size_t, 3>{bx.first, by.first, bz.first},
        std::array<std::size_t, 3>{bx.second, by.second, bz.second}, b.wavelengths);
    b.dft_y = std::make_unique<DftVolumeMonitor>(
        spec, std::array<std::size_t, 3>{bx.first, by.first, bz.first},
        std::array<std::size_t, 3>{bx.second, by.second, bz.second}, b.wavelengths);
  }
  b.flux_in = std::make_unique<FluxMonitor>(spec, b.port_plane + 4, ilo[1], ihi[1],
                                            ilo[2], ihi[2], b.wavelengths);
  b.flux_out = std::make_unique<FluxMonitor>(spec, spec.nx - p - 4, ilo[1], ihi[1],
                                             ilo[2], ihi[2], b.wavelengths);
  return b;
}

namespace {

constexpr const char* kSummaryHeader[] = {
    "kind_id",           "nx",
    "ny",                "nz",
    "mesh_step_m",       "dt_s",
    "steps",             "wavelength_m",
    "power_w",           "nd_x_m",
    "nd_y_m",            "nd_z_m",
    "e_center_v_per_m",  "ex_center_v_per_m",
    "ey_center_v_per_m", "ez_center_v_per_m",
    "flux_in_w",         "flux_out_w",
    "grating_n_per_side", "grating_period_m"};

std::vector<std::string> summary_header() {
  return {std::begin(kSummaryHeader), std::end(kSummaryHeader)};
}

RunManifest base_manifest(const ScenarioConfig& cfg, const BuiltScenario& b, int threads) {
  RunManifest m;
  m.kind = to_string(cfg.kind);
  m.scale = cfg.scale;
  m.config_text = canonical_config(cfg);
  m.nx = b.grid->spec.nx;
  m.ny = b.grid->spec.ny;
  m.nz = b.grid->spec.nz;
  m.mesh_step = cfg.domain.mesh_step;
  m.dt = b.grid->dt;
  m.threads = threads;
  return m;
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                            int threads, bool dump_fields) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  BuiltScenario b = build(cfg);
  SlabPool pool(threads);
  Monitors mon;
  mon.dft = {b.dft_x.get(), b.dft_y.get()};
  mon.flux = {b.flux_in.get(), b.flux_out.get()};
  std::vector<Source*> sources{b.port.get()};
  const TimeEnvelope env = make_envelope(cfg);

  ScenarioResult res;
  res.grid_spec = b.grid->spec;
  res.dt = b.grid->dt;

  try {
    if (cfg.run.mode == RunMode::Cw) {
      CwOptions opt;
      opt.max_time = cfg.run.max_time;
      opt.measure_cycles = cfg.run.measure_cycles;
      opt.probe = b.nd_cell;
      res.stats = run_cw(*b.grid, b.pml, sources, pool, env, opt, mon);
    } else {
      PulsedOptions opt;
      opt.max_time = cfg.run.max_time;
      opt.probe = b.nd_cell;
      opt.sample_stride = cfg.run.sample_stride;
      const double len = cfg.domain.x_max - cfg.domain.x_min;
      opt.min_time = env.pulse_center + 10.0 * env.pulse_sigma + 1.8 * len / c0;
      res.stats = run_pulsed(*b.grid, b.pml, sources, pool, env, opt, mon);
    }
  } catch (const NumericalError& e) {
    RunManifest m = base_manifest(cfg, b, threads);
    m.complete = false;
    m.error = e.what();
    m.termination = "numerical_error";
    write_manifest(m, out_dir, {});
    throw;
  }

  const std::array<double, 3> nd = nanodiamond_center(cfg);
  const std::size_t li = cfg.run.mode == RunMode::Cw
                             ? 0
                             : nearest_index(b.wavelengths, cfg.source.wavelength);
  const FieldSample fs = b.dft_y->field_at(li, nd[0], nd[1], nd[2]);
  res.e_center = fs.e_mag;
  res.ex_center = fs.ex_mag;
  res.ey_center = fs.ey_mag;
  res.ez_center = fs.ez_mag;
  res.flux_in = b.flux_in->flux_spectrum().values[li];
  res.flux_out = b.flux_out->flux_spectrum().values[li];

  const double kind_id = cfg.kind == ScenarioKind::Objective ? 0.0
                         : cfg.kind == ScenarioKind::Fiber   ? 1.0
                                                             : 2.0;
  const double n_side = cfg.kind == ScenarioKind::Nfbc
                            ? double(cfg.grating.grooves_per_side)
                            : 0.0;
  const double period = cfg.kind == ScenarioKind::Nfbc ? cfg.grating.period : 0.0;
  write_csv(out_dir + "/summary.csv", summary_header(),
            {{kind_id, double(b.grid->spec.nx), double(b.grid->spec.ny),
              double(b.grid->spec.nz), cfg.domain.mesh_step, b.grid->dt,
              double(res.stats.steps), cfg.source.wavelength, cfg.source.power, nd[0],
              nd[1], nd[2], res.e_center, res.ex_center, res.ey_center, res.ez_center,
              res.flux_in, res.flux_out, n_side, period}});
  res.outputs.push_back("summary.csv");

  if (cfg.run.mode == RunMode::Cw) {
    b.dft_x->export_cutline(li, 0, nd[1], nd[2], out_dir + "/cutline_x.csv");
    b.dft_y->export_cutline(li, 1, nd[0], nd[2], out_dir + "/cutline_y.csv");
    res.outputs.push_back("cutline_x.csv");
    res.outputs.push_back("cutline_y.csv");
  } else {
    res.flux_in_spectrum = b.flux_in->flux_spectrum();
    res.flux_out_spectrum = b.flux_out->flux_spectrum();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < b.wavelengths.size(); ++i)
      rows.push_back({b.wavelengths[i], res.flux_in_spectrum.values[i],
                      res.flux_out_spectrum.values[i]});
    write_csv(out_dir + "/spectrum.csv", {"wavelength_m", "flux_in", "flux_out"}, rows);
    res.outputs.push_back("spectrum.csv");

    res.nd_spectrum.wavelengths = b.wavelengths;
    rows.clear();
    for (std::size_t i = 0; i < b.wavelengths.size(); ++i) {
      const FieldSample s = b.dft_y->field_at(i, nd[0], nd[1], nd[2]);
      res.nd_spectrum.values.push_back(s.e_mag);
      rows.push_back({b.wavelengths[i], s.e_mag, s.ex_mag, s.ey_mag, s.ez_mag});
    }
    write_csv(out_dir + "/nd_spectrum.csv",
              {"wavelength_m", "e_mag", "ex_mag", "ey_mag", "ez_mag"}, rows);
    res.outputs.push_back("nd_spectrum.csv");
  }

  if (dump_fields) {
    const auto dumped = dump_grid_fields(*b.grid, out_dir);
    res.outputs.insert(res.outputs.end(), dumped.begin(), dumped.end());
  }

  RunManifest m = base_manifest(cfg, b, threads);
  m.steps = res.stats.steps;
  m.wall_seconds = res.stats.wall_seconds;
  m.termination = res.stats.termination;
  write_manifest(m, out_dir, res.outputs);
  res.outputs.push_back("manifest.json");
  return res;
}

namespace {

// e_center_v_per_m from a previously written summary.csv, or a negative
// value when the file is absent/unusable (callers then re-run the point).
double cached_e_center(const std::string& dir) {
  const std::string path = dir + "/summary.csv";
  if (!std::filesystem::exists(path)) return -1.0;
  try {
    const CsvTable t = read_csv(path);
    if (t.rows.size() != 1) return -1.0;
    const auto want = summary_header();
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (t.header[c] == "e_center_v_per_m") return t.rows[0][c];
    return -1.0;
  } catch (const std::exception&) {
    return -1.0;
  }
}

std::string sweep_point_dir(std::size_t n, double size) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "N%zu_s%llunm", n,
                static_cast<unsigned long long>(std::llround(size * 1e9)));
  return buf;
}

Spectrum read_flux_out_spectrum(const std::string& dir) {
  const CsvTable t = read_csv(dir + "/spectrum.csv");
  Spectrum s;
  for (const auto& row : t.rows) {
    s.wavelengths.push_back(row[0]);
    s.values.push_back(row[2]);
  }
  return s;
}

struct BandFeature {
  double lambda = 0;   // resonance peak if resolved, else stopband center
  bool is_peak = false;
  double dip_t = 1.0;
  double band_lo = 0, band_hi = 0;
};

// Locate the stopband and, if resolvable, the cavity resonance inside it.
BandFeature find_band_feature(const std::vector<double>& wl,
                              const std::vector<double>& t) {
  const std::size_t n = wl.size();
  const std::size_t guard = 4;
  if (n < 2 * guard + 5) throw NumericalError("transmission grid too small to tune on");
  std::size_t i_dip = guard;
  for (std::size_t i = guard; i + guard < n; ++i)
    if (t[i] < t[i_dip]) i_dip = i;
  BandFeature f;
  f.dip_t = t[i_dip];
  if (f.dip_t > 0.8)
    throw NumericalError("no stopband found (minimum transmission " +
                         std::to_string(f.dip_t) + "); grating too weak to tune on");
  const double edge = std::min(0.6, f.dip_t + 0.5 * (1.0 - f.dip_t));
  std::size_t lo = i_dip, hi = i_dip;
  while (lo > 0 && t[lo] < edge) --lo;
  while (hi + 1 < n && t[hi] < edge) ++hi;
  f.band_lo = wl[lo];
  f.band_hi = wl[hi];
  // strongest interior local maximum = the cavity line
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = lo + 2; i + 2 <= hi && i + 1 < n; ++i) {
    if (t[i] > t[i - 1] && t[i] >= t[i + 1] && (!found || t[i] > t[best])) {
      best = i;
      found = true;
    }
  }
  if (found && t[best] > f.dip_t + 0.05) {
    f.is_peak = true;
    f.lambda = wl[best];
  } else {
    f.lambda = 0.5 * (f.band_lo + f.band_hi);
  }
  return f;
}

// Symmetric x-extent covering the groove span plus launch/exit margins,
// bounded below so even a bare fiber has room to settle. Grows or shrinks
// the configured extent: sweep points and tuning runs own their domain.
void fit_domain_to_span(ScenarioConfig& c, double span) {
  const double len = std::max(span + 3e-6, 8e-6);
  c.domain.x_min = -0.5 * len;
  c.domain.x_max = 0.5 * len;
}

// Derived pulsed calibration run. Everything that does not describe the
// physical device is normalized away (sweep axes, run mode, time cap) so
// that configs differing only in those fields share tuning runs on disk.
ScenarioConfig tuning_run_config(const ScenarioConfig& base, std::size_t n_per_side,
                                 double period, double domain_span) {
  ScenarioConfig c = base;
  c.run.mode = RunMode::Pulsed;
  c.run.max_time = std::max(c.run.max_time, 1.5e-12);
  c.grating.grooves_per_side = n_per_side;
  c.grating.period = period;
  c.sweep = SweepSpec{};
  fit_domain_to_span(c, domain_span);
  return c;
}

ScenarioResult run_or_reuse(const ScenarioConfig& cfg, const std::string& dir,
                            int threads) {
  if (cached_e_center(dir) >= 0 && std::filesystem::exists(dir + "/spectrum.csv")) {
    ScenarioResult r;
    r.flux_out_spectrum = read_flux_out_spectrum(dir);
    r.e_center = cached_e_center(dir);
    return r;
  }
  return run_scenario(cfg, dir, threads, false);
}

} // namespace

double tune_grating_period(const ScenarioConfig& cfg, const std::string& out_dir,
                           int threads, int max_iter) {
  if (cfg.kind != ScenarioKind::Nfbc)
    throw ConfigError("scenario.kind: period tuning requires kind nfbc");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  const double target = cfg.source.wavelength;
  const std::size_t n_tune = std::max<std::size_t>(
      std::min<std::size_t>(cfg.grating.grooves_per_side, 40), 20);
  // one fixed tuning domain, wide enough for the longest period the
  // clamped search below can reach, shared by the reference run
  const double span_cap =
      cfg.grating.gap + 2.0 * double(n_tune) * 1.2 * cfg.grating.period;

  // shared bare-fiber reference spectrum
  ScenarioConfig ref_cfg = tuning_run_config(cfg, 0, cfg.grating.period, span_cap);
  const ScenarioResult ref = run_or_reuse(ref_cfg, out_dir + "/tune_ref", threads);

  const double bin = (cfg.run.pulse_lambda_max - cfg.run.pulse_lambda_min) /
                     double(cfg.run.pulse_count - 1);
  double period = cfg.grating.period;
  double prev_period = 0, prev_err = 0;
  bool have_prev = false;
  for (int it = 0; it < max_iter; ++it) {
    ScenarioConfig c = tuning_run_config(cfg, n_tune, period, span_cap);
    char name[48];
    std::snprintf(name, sizeof name, "tune_P%llupm",
                  static_cast<unsigned long long>(std::llround(period * 1e12)));
    const ScenarioResult r = run_or_reuse(c, out_dir + "/" + name, threads);
    const Spectrum tr = transmission(r.flux_out_spectrum, ref.flux_out_spectrum);
    const BandFeature f = find_band_feature(tr.wavelengths, tr.values);
    const double err = f.lambda - target;
    if (std::abs(err) <= bin) return period;
    double next;
    if (have_prev && std::abs(err - prev_err) > 1e-12) {
      next = period - err * (period - prev_period) / (err - prev_err);
    } else {
      next = period * target / f.lambda;
    }
    next = std::min(std::max(next, 0.85 * cfg.grating.period),
                    1.2 * cfg.grating.period);
    prev_period = period;
    prev_err = err;
    have_prev = true;
    period = next;
  }
  return period;
}

SweepResult run_sweep(const ScenarioConfig& cfg, const std::string& out_dir,
                      int threads, bool resume) {
  if (cfg.kind != ScenarioKind::Nfbc)
    throw ConfigError("scenario.kind: sweeps require kind nfbc");
  if (cfg.sweep.ns.empty()) throw ConfigError("sweep.ns: empty sweep");
  if (cfg.sweep.sizes.empty()) throw ConfigError("sweep.sizes: empty sweep");
  if (!(cfg.sweep.reference_field > 0))
    throw ConfigError("sweep.reference_field: must be > 0 (the power-ratio column is "
                      "(reference/E)^2)");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  SweepResult result;
  result.tuned_period = cfg.sweep.tune_period
                            ? tune_grating_period(cfg, out_dir, threads)
                            : cfg.grating.period;

  ScenarioConfig base = cfg;
  base.run.mode = RunMode::Cw;
  base.grating.period = result.tuned_period;

  for (double size : cfg.sweep.sizes) {
    for (std::size_t n : cfg.sweep.ns) {
      ScenarioConfig point = base;
      point.grating.grooves_per_side = n;
      point.nanodiamond.size = size;
      // size each point's domain to its own grating, not the sweep maximum
      fit_domain_to_span(point, grating_span_of(point.grating));
      const std::string dir = out_dir + "/" + sweep_point_dir(n, size);
      double e = resume ? cached_e_center(dir) : -1.0;
      if (e < 0) {
        try {
          e = run_scenario(point, dir, threads, false).e_center;
        } catch (const std::exception& err) {
          throw NumericalError("sweep point N=" + std::to_string(n) + " size=" +
                               std::to_string(std::llround(size * 1e9)) + "nm: " +
                               err.what());
        }
      }
      SweepRow row;
      row.n_per_side = n;
      row.nd_size = size;
      row.e_center = e;
      row.power_ratio = (cfg.sweep.reference_field / e) * (cfg.sweep.reference_field / e);
      result.rows.push_back(row);
    }
  }

  std::vector<std::vector<double>> rows;
  for (const auto& r : result.rows)
    rows.push_back({double(r.n_per_side), r.nd_size, r.e_center, r.power_ratio});
  write_csv(out_dir + "/sweep.csv",
            {"N_per_side", "nd_size_m", "E_center_V_per_m", "power_ratio"}, rows);

  RunManifest m;
  m.kind = to_string(cfg.kind);
  m.scale = cfg.scale;
  m.config_text = canonical_config(base);
  m.mesh_step = base.domain.mesh_step;
  m.termination = "sweep";
  m.threads = threads;
  write_manifest(m, out_dir, {"sweep.csv"});
  return result;
}

} // namespace nfbc
