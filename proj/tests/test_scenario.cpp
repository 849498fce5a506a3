#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "nfbc/constants.hpp"
#include "nfbc/cpml.hpp"
#include "nfbc/errors.hpp"
#include "nfbc/grid.hpp"
#include "nfbc/monitor.hpp"
#include "nfbc/simulation.hpp"
#include "nfbc/source.hpp"
#include "nfbc/thread_pool.hpp"

using namespace nfbc;

namespace {

GridSpec centered_spec(std::size_t nx, std::size_t ny, std::size_t nz, double d) {
  GridSpec s;
  s.nx = nx;
  s.ny = ny;
  s.nz = nz;
  s.dx = s.dy = s.dz = d;
  s.origin_x = 0;
  s.origin_y = -0.5 * double(ny) * d;
  s.origin_z = -0.5 * double(nz) * d;
  return s;
}

} // namespace

TEST_CASE("cw auto run converges on a radiating dipole and measures it") {
  const double lam = 532e-9;
  TimeEnvelope env;
  env.carrier_wavelength = lam;
  env.ramp_cycles = 6;

  YeeGrid g(centered_spec(32, 32, 32, 25e-9));
  CpmlSpec ps;
  ps.thickness = 8;
  CpmlState pml = make_cpml(g.spec, ps);
  SlabPool pool(1);
  SoftPatchSource dip(SoftPatchSource::Component::Ey, 16, 16, 16, {1.0}, 1, 1, env);
  std::vector<Source*> sources{&dip};

  DftVolumeMonitor dft(g.spec, {18, 14, 14}, {22, 18, 18}, {lam});
  FluxMonitor flux(g.spec, 24, 8, 24, 8, 24, {lam});
  PointProbe probe(g.spec, 19, 16, 16, 5);
  Monitors mon;
  mon.dft.push_back(&dft);
  mon.flux.push_back(&flux);
  mon.probes.push_back(&probe);

  CwOptions opt;
  opt.max_time = 200 * lam / c0;
  opt.measure_cycles = 10;
  opt.probe = {19, 16, 16};
  const RunStats st = run_cw(g, pml, sources, pool, env, opt, mon);

  CHECK(st.termination == "converged");
  CHECK(st.steps > 200);
  CHECK(st.wall_seconds > 0);
  CHECK(dft.finalized());
  CHECK(flux.finalized());
  CHECK(std::abs(dft.amp(0, 1, 19, 16, 16)) > 0);
  CHECK(flux.flux_spectrum().values[0] > 0); // power flows out through +x
  CHECK(probe.t().size() == st.steps / 5);

  // a cap tighter than the settling time is reported, not thrown
  YeeGrid g2(centered_spec(32, 32, 32, 25e-9));
  CpmlState pml2 = make_cpml(g2.spec, ps);
  DftVolumeMonitor dft2(g2.spec, {18, 14, 14}, {22, 18, 18}, {lam});
  Monitors mon2;
  mon2.dft.push_back(&dft2);
  CwOptions tight = opt;
  tight.max_time = 12 * lam / c0;
  const RunStats st2 = run_cw(g2, pml2, sources, pool, env, tight, mon2);
  CHECK(st2.termination == "max_time_reached");
  CHECK(dft2.finalized());

  CwOptions bad = opt;
  bad.max_time = 2 * lam / c0; // shorter than the 6-cycle ramp
  YeeGrid g3(centered_spec(32, 32, 32, 25e-9));
  CHECK_THROWS_AS(run_cw(g3, pml2, sources, pool, env, bad, mon2), ConfigError);
  TimeEnvelope pulse;
  pulse.kind = TimeEnvelope::Kind::GaussianPulse;
  CHECK_THROWS_AS(run_cw(g3, pml2, sources, pool, pulse, opt, mon2), ConfigError);
}

TEST_CASE("pulsed run decays, and vacuum transmission between planes is flat") {
  const double lam = 532e-9;
  TimeEnvelope env;
  env.kind = TimeEnvelope::Kind::GaussianPulse;
  env.carrier_wavelength = lam;
  env.pulse_sigma = 2e-15;
  env.pulse_center = 10e-15;

  YeeGrid g(centered_spec(64, 56, 56, 25e-9));
  CpmlSpec ps;
  ps.thickness = 8;
  CpmlState pml = make_cpml(g.spec, ps);
  SlabPool pool(1);
  PlaneWavePort port = make_gaussian_beam(g, 12, env, 1e-3, 0.45e-6, 0.8e-6);
  std::vector<Source*> sources{&port};

  const std::vector<double> lams = {470e-9, 500e-9, 532e-9, 570e-9, 620e-9};
  FluxMonitor near_f(g.spec, 16, 6, 50, 6, 50, lams);
  FluxMonitor far_f(g.spec, 32, 6, 50, 6, 50, lams);
  DftVolumeMonitor focus(g.spec, {42, 26, 26}, {46, 30, 30}, {lam});
  Monitors mon;
  mon.flux.push_back(&near_f);
  mon.flux.push_back(&far_f);
  mon.dft.push_back(&focus);

  PulsedOptions opt;
  opt.max_time = 80e-15;
  opt.decay_threshold = 1e-3;
  opt.min_time = 25e-15;
  opt.probe = {44, 28, 28};
  opt.sample_stride = 2;
  const RunStats st = run_pulsed(g, pml, sources, pool, env, opt, mon);

  CHECK(st.termination == "decayed");
  CHECK(double(st.steps) * g.dt < opt.max_time);
  CHECK(near_f.finalized());

  const Spectrum t = transmission(far_f.flux_spectrum(), near_f.flux_spectrum());
  for (double v : t.values) {
    CHECK(v > 0.9);
    CHECK(v < 1.02);
  }
  CHECK(std::abs(focus.amp(0, 1, 44, 28, 28)) > 0);

  PulsedOptions bad = opt;
  bad.max_time = 0;
  CHECK_THROWS_AS(run_pulsed(g, pml, sources, pool, env, bad, mon), ConfigError);
}

#include <array>
#include <filesystem>
#include <fstream>
#include <string>

#include "nfbc/config.hpp"
#include "nfbc/csv_io.hpp"
#include "nfbc/geometry.hpp"
#include "nfbc/scenario.hpp"

namespace {

// Small closed-box fiber configuration that builds in well under a second.
ScenarioConfig tiny_fiber(double x_half = 1.0e-6) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::Fiber;
  cfg.scale = "full";
  cfg.domain.x_min = -x_half;
  cfg.domain.x_max = x_half;
  cfg.domain.y_half = 0.55e-6;
  cfg.domain.z_half = 0.55e-6;
  cfg.domain.mesh_step = 25e-9;
  cfg.source.ramp_cycles = 6;
  cfg.run.max_time = 25e-15;
  cfg.run.measure_cycles = 6;
  return cfg;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / "nfbc_tests" / name;
  std::filesystem::remove_all(p);
  return p;
}

} // namespace

TEST_CASE("nanodiamond placement and config validation") {
  ScenarioConfig b = tiny_fiber();
  const auto c_fiber = nanodiamond_center(b);
  CHECK(c_fiber[0] == 0.0);
  CHECK(c_fiber[1] == doctest::Approx(150e-9 + 12.5e-9));
  CHECK(c_fiber[2] == 0.0);
  CHECK(validate_all(b).empty());

  ScenarioConfig a = b;
  a.kind = ScenarioKind::Objective;
  a.domain.x_min = -2.0e-6;
  a.beam.focus_offset = 1.5e-6;
  const auto c_obj = nanodiamond_center(a);
  CHECK(c_obj == std::array<double, 3>{0.0, 0.0, 0.0});
  CHECK(validate_all(a).empty());

  const auto has = [](const std::vector<std::string>& v, const std::string& key) {
    for (const auto& s : v)
      if (s.rfind(key + ":", 0) == 0) return true;
    return false;
  };

  ScenarioConfig bad = b;
  bad.domain.courant = 0.0;
  bad.domain.pml_cells = 2;
  bad.domain.supersample = 9;
  bad.source.polarization = "x";
  bad.run.max_time = 0.0;
  const auto v = validate_all(bad);
  CHECK(has(v, "domain.courant"));
  CHECK(has(v, "domain.pml_cells"));
  CHECK(has(v, "domain.supersample"));
  CHECK(has(v, "source.polarization"));
  CHECK(has(v, "run.max_time"));

  ScenarioConfig deep = b;
  deep.kind = ScenarioKind::Nfbc;
  deep.grating.grooves_per_side = 2;
  deep.grating.depth = 200e-9; // deeper than the 150 nm radius
  CHECK(has(validate_all(deep), "grating.depth"));

  ScenarioConfig overlap = deep;
  overlap.grating.depth = 30e-9;
  overlap.grating.groove_radius = 60e-9;
  overlap.grating.period = 100e-9;
  CHECK(has(validate_all(overlap), "grating.groove_radius"));

  ScenarioConfig wide = b;
  wide.kind = ScenarioKind::Nfbc;
  wide.grating.grooves_per_side = 6; // span exceeds the 2 um domain
  CHECK(has(validate_all(wide), "grating.n_per_side"));

  ScenarioConfig ramp = b;
  ramp.run.max_time = 5e-15; // shorter than the 6-cycle ramp
  CHECK(has(validate_all(ramp), "run.max_time"));

  ScenarioConfig focus = a;
  focus.beam.focus_offset = 1.9e-6; // source plane lands inside the boundary layer
  CHECK(has(validate_all(focus), "beam.focus_offset"));
  CHECK_THROWS_AS(build(focus), ConfigError);

  ScenarioConfig pulsed = b;
  pulsed.run.mode = RunMode::Pulsed;
  pulsed.run.pulse_count = 1;
  pulsed.run.pulse_lambda_max = 400e-9;
  const auto vp = validate_all(pulsed);
  CHECK(has(vp, "run.pulse_count"));
  CHECK(has(vp, "run.pulse_lambda_min"));
}

TEST_CASE("desk preset bounds the domain and is idempotent") {
  ScenarioConfig big;
  big.kind = ScenarioKind::Fiber;
  big.domain.x_min = -60e-6;
  big.domain.x_max = 60e-6;
  big.domain.y_half = 4e-6;
  big.domain.z_half = 4e-6;
  big.domain.mesh_step = 5e-9;
  big.run.max_time = 0;
  const ScenarioConfig d = desk_preset(big);
  CHECK(d.scale == "desk");
  CHECK(d.domain.x_min == -10e-6);
  CHECK(d.domain.x_max == 10e-6);
  CHECK(d.domain.y_half == 0.75e-6);
  CHECK(d.domain.mesh_step == 20e-9);
  CHECK(d.run.max_time > 0);
  CHECK(validate_all(d).empty());
  const ScenarioConfig dd = desk_preset(d);
  CHECK(canonical_config(dd) == canonical_config(d));

  // a desk cavity grows past the nominal fiber length when the grating needs it
  ScenarioConfig cav;
  cav.kind = ScenarioKind::Nfbc;
  cav.domain.x_min = -60e-6;
  cav.domain.x_max = 60e-6;
  cav.grating.grooves_per_side = 200;
  const ScenarioConfig dc = desk_preset(cav);
  CHECK(dc.grating.grooves_per_side == 80);
  const double span = dc.grating.gap + 2.0 * 80.0 * dc.grating.period;
  CHECK(dc.domain.x_max - dc.domain.x_min >= span + 2e-6);
  CHECK(validate_all(dc).empty());
  CHECK(canonical_config(desk_preset(dc)) == canonical_config(dc));
}

TEST_CASE("zero-groove cavity builds the same grid as the bare fiber") {
  ScenarioConfig fib = tiny_fiber();
  ScenarioConfig cav = fib;
  cav.kind = ScenarioKind::Nfbc;
  cav.grating.grooves_per_side = 0;

  const BuiltScenario bf = build(fib);
  const BuiltScenario bc = build(cav);
  CHECK(bf.grid->spec.nx == 80);
  CHECK(bf.grid->spec.ny == 44);
  CHECK(bf.grid->spec.nz == 44);
  CHECK(bc.grid->cex.v == bf.grid->cex.v);
  CHECK(bc.grid->cey.v == bf.grid->cey.v);
  CHECK(bc.grid->cez.v == bf.grid->cez.v);

  // grooves actually remove material
  ScenarioConfig grooved = cav;
  grooved.grating.grooves_per_side = 2;
  const BuiltScenario bg = build(grooved);
  CHECK(bg.grid->cey.v != bf.grid->cey.v);

  // the particle sits on top of the fiber, dielectric in the raster
  const auto nd = nanodiamond_center(fib);
  CHECK(fib.nanodiamond.enabled);
  CHECK(bf.scene.eps_at(nd[0], nd[1], nd[2]) == doctest::Approx(2.417 * 2.417));
  const Array3 eps_y = eps_r_array(*bf.grid, 1);
  CHECK(eps_y(40, 28, 22) > 3.0); // node at the particle center
  CHECK(bf.nd_cell == std::array<std::size_t, 3>{40, 28, 22});
  CHECK(bf.port_plane == 12); // just inside the absorbing layer

  ScenarioConfig nond = fib;
  nond.nanodiamond.enabled = false;
  const BuiltScenario bn = build(nond);
  CHECK(bn.scene.items.size() == 1);
  CHECK(bf.scene.items.size() == 2);

  ScenarioConfig obj = tiny_fiber();
  obj.kind = ScenarioKind::Objective;
  obj.domain.x_min = -2.0e-6;
  obj.beam.focus_offset = 1.5e-6;
  const BuiltScenario bo = build(obj);
  CHECK(bo.port_plane == 20); // 0.5 um downstream of x_min
  CHECK(!bo.mode.has_value());
  CHECK(bo.scene.items.size() == 1); // particle only, no fiber
}

TEST_CASE("pulsed scenario run emits spectra and a manifest") {
  ScenarioConfig cfg = tiny_fiber();
  cfg.run.mode = RunMode::Pulsed;
  cfg.run.max_time = 3e-13;
  cfg.run.pulse_lambda_min = 480e-9;
  cfg.run.pulse_lambda_max = 600e-9;
  cfg.run.pulse_count = 13;
  cfg.run.pulse_sigma = 2e-15;
  const auto dir = scratch("pulsed_smoke");

  const ScenarioResult r = run_scenario(cfg, dir.string(), 2, false);
  CHECK(r.stats.termination == "decayed");
  CHECK(r.flux_in_spectrum.values.size() == 13);
  for (const char* f : {"summary.csv", "spectrum.csv", "nd_spectrum.csv",
                        "manifest.json"})
    CHECK(std::filesystem::exists(dir / f));

  // mid-band the bare fiber passes nearly all launched power
  const CsvTable sp = read_csv((dir / "spectrum.csv").string());
  CHECK(sp.rows.size() == 13);
  for (std::size_t i = 4; i <= 8; ++i) {
    const double t = sp.rows[i][2] / sp.rows[i][1];
    CHECK(t > 0.5);
    CHECK(t < 1.1);
  }
  const CsvTable nd = read_csv((dir / "nd_spectrum.csv").string());
  CHECK(nd.rows.size() == 13);
  CHECK(nd.rows[6][1] > 0.0); // field actually reaches the particle

  const CsvTable sum = read_csv((dir / "summary.csv").string());
  CHECK(sum.rows.size() == 1);
  CHECK(sum.rows[0][0] == 1.0); // kind id: fiber
}

TEST_CASE("sweep resumes from cached points without re-running them") {
  ScenarioConfig cfg = tiny_fiber();
  cfg.kind = ScenarioKind::Nfbc;
  cfg.grating.grooves_per_side = 2;
  cfg.sweep.ns = {2};
  cfg.sweep.sizes = {25e-9};
  cfg.sweep.reference_field = 2e6;
  const auto dir = scratch("sweep_resume");

  // pre-populate the single point with a synthetic completed summary
  const auto point = dir / "N2_s25nm";
  std::filesystem::create_directories(point);
  {
    std::ofstream out(point / "summary.csv");
    out << "kind_id,nx,ny,nz,mesh_step_m,dt_s,steps,wavelength_m,power_w,"
           "nd_x_m,nd_y_m,nd_z_m,e_center_v_per_m,ex_center_v_per_m,"
           "ey_center_v_per_m,ez_center_v_per_m,flux_in_w,flux_out_w,"
           "grating_n_per_side,grating_period_m\n";
    out << "2,80,44,44,2.5e-08,1e-17,100,5.32e-07,0.001,0,1.625e-07,0,"
           "1.0e+06,0,1.0e+06,0,0.001,0.0009,2,2.73e-07\n";
  }

  const SweepResult r = run_sweep(cfg, dir.string(), 1, true);
  CHECK(r.rows.size() == 1);
  CHECK(r.rows[0].e_center == doctest::Approx(1.0e6));
  CHECK(r.rows[0].power_ratio == doctest::Approx(4.0)); // (2e6 / 1e6)^2
  CHECK(r.tuned_period == cfg.grating.period);
  CHECK(std::filesystem::exists(dir / "sweep.csv"));
  const CsvTable t = read_csv((dir / "sweep.csv").string());
  CHECK(t.header == std::vector<std::string>{"N_per_side", "nd_size_m",
                                             "E_center_V_per_m", "power_ratio"});

  ScenarioConfig bad = cfg;
  bad.sweep.reference_field = 0;
  CHECK_THROWS_AS(run_sweep(bad, (dir / "x").string(), 1, false), ConfigError);
  bad = cfg;
  bad.sweep.sizes.clear();
  CHECK_THROWS_AS(run_sweep(bad, (dir / "y").string(), 1, false), ConfigError);
}
