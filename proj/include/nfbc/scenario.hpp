#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nfbc/fiber_mode.hpp"
#include "nfbc/geometry.hpp"
#include "nfbc/simulation.hpp"

namespace nfbc {

// The three drive configurations: focused free-space beam onto the particle,
// guided-mode injection into a bare nanofiber, and the same fiber with a
// Bragg grating + central gap (a cavity) milled into it.
enum class ScenarioKind { Objective, Fiber, Nfbc };
enum class RunMode { Cw, Pulsed };

const char* to_string(ScenarioKind k);
const char* to_string(RunMode m);

struct DomainSpec {
  double x_min = -10e-6, x_max = 10e-6;
  double y_half = 0.75e-6, z_half = 0.75e-6;
  double mesh_step = 20e-9;
  double courant = 0.5;
  std::size_t pml_cells = 10;
  int supersample = 4;
};

// Free-space source (kind objective): Gaussian amplitude of the given 1/e^2
// intensity diameter on the injection plane with a spherical phase front
// converging on the particle center `focus_offset` downstream. The numerical
// aperture is carried for bookkeeping; the injected profile is fully
// determined by diameter + offset.
struct BeamSpec {
  double numerical_aperture = 0.95;
  double beam_diameter = 5.5e-6;
  double focus_offset = 3e-6;
};

struct FiberSpecCfg {
  double radius = 150e-9;
  double index = 1.46;
};

struct NanodiamondSpec {
  bool enabled = true;
  double size = 25e-9; // outer diameter
  NdKind shape = NdKind::Sphere;
  std::uint64_t seed = 1;
  int vertices = 120; // polyhedron only
  double index = 2.417;
};

struct SourceSpecCfg {
  double wavelength = 532e-9;
  double power = 1e-3;
  double ramp_cycles = 10.0;
  std::string polarization = "y"; // only y-polarized drives are supported
};

struct RunSpec {
  RunMode mode = RunMode::Cw;
  double max_time = 0; // hard cap [s]; must be set
  double measure_cycles = 25;
  // Pulsed runs: recorded wavelength grid and the source pulse width.
  double pulse_lambda_min = 450e-9;
  double pulse_lambda_max = 750e-9;
  std::size_t pulse_count = 151;
  double pulse_sigma = 2.2e-15;
  std::size_t sample_stride = 2;
};

struct SweepSpec {
  std::vector<std::size_t> ns;
  std::vector<double> sizes;
  double reference_field = 0; // V/m; the power-ratio column is (ref/E)^2
  bool tune_period = false;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Fiber;
  std::string scale = "desk"; // "desk" | "full", a provenance label
  DomainSpec domain;
  SourceSpecCfg source;
  BeamSpec beam;        // objective only
  FiberSpecCfg fiber;   // fiber | nfbc
  GratingSpec grating;  // nfbc only
  NanodiamondSpec nanodiamond;
  RunSpec run;
  SweepSpec sweep; // nfbc only, optional
};

// Every constraint violation in the config, each prefixed with the offending
// key path ("domain.mesh_step: ..."); empty means valid.
std::vector<std::string> validate_all(const ScenarioConfig& cfg);
// Throws ConfigError with all violations joined if any exist.
void validate(const ScenarioConfig& cfg);

// Particle center: the beam focus (coordinate origin) for kind objective,
// riding on top of the fiber for the fiber kinds.
std::array<double, 3> nanodiamond_center(const ScenarioConfig& cfg);

// Clamp a configuration to desk scale: coarser mesh floor, bounded domain
// (for nfbc: grown if needed so the grating still fits), grooves-per-side
// capped at 80, preset run-time caps. Materials, wavelength, fiber diameter
// and grating period/depth/gap are never touched. Idempotent.
ScenarioConfig desk_preset(const ScenarioConfig& cfg);

// Fully assembled run: grid with rasterized materials, absorbing boundaries,
// source port, and the standard monitor set appropriate for cfg.run.mode.
struct BuiltScenario {
  ScenarioConfig cfg;
  Scene scene;
  std::unique_ptr<YeeGrid> grid;
  CpmlState pml;
  std::optional<ModeSolution> mode; // fiber kinds
  std::unique_ptr<PlaneWavePort> port;
  std::size_t port_plane = 0;
  std::array<std::size_t, 3> nd_cell{}; // cell whose center is nearest the particle
  std::vector<double> wavelengths;      // monitor grid (1 entry for cw)

  std::unique_ptr<DftVolumeMonitor> dft_x; // slab along x through the particle
  std::unique_ptr<DftVolumeMonitor> dft_y; // slab along y through the particle
  std::unique_ptr<FluxMonitor> flux_in, flux_out;
};

BuiltScenario build(const ScenarioConfig& cfg);

struct ScenarioResult {
  // |E| and component magnitudes at the particle center, at the source
  // wavelength (cw) or at the grid wavelength nearest 532 nm (pulsed).
  double e_center = 0, ex_center = 0, ey_center = 0, ez_center = 0;
  double flux_in = 0, flux_out = 0; // W (cw) / spectral density (pulsed)
  Spectrum flux_in_spectrum, flux_out_spectrum; // pulsed
  Spectrum nd_spectrum;                         // pulsed, |E| at particle center
  RunStats stats;
  GridSpec grid_spec;
  double dt = 0;
  std::vector<std::string> outputs; // file names written under out_dir
};

// Build + run + write the output set (summary.csv, cutlines or spectra,
// run manifest, optional raw field dumps) into out_dir (created if absent).
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                            int threads, bool dump_fields = false);

struct SweepRow {
  std::size_t n_per_side = 0;
  double nd_size = 0;
  double e_center = 0;
  double power_ratio = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double tuned_period = 0;
};

// One cw run per (grooves-per-side, particle size) pair from cfg.sweep, each
// in a domain shrunk to its own grating span plus working margins. Each point
// writes its own subdirectory of out_dir; with resume=true, points whose
// summary.csv already parses are reused instead of re-run. Writes sweep.csv.
// A failing member run aborts the sweep naming the point.
SweepResult run_sweep(const ScenarioConfig& cfg, const std::string& out_dir,
                      int threads, bool resume = false);

// Re-center the grating stopband/resonance on the source wavelength: pulsed
// transmission runs against a bare-fiber reference, moving the period until
// the in-stopband resonance peak sits on source.wavelength (within half a
// spectral bin, at most `max_iter` attempts). Returns the chosen period.
double tune_grating_period(const ScenarioConfig& cfg, const std::string& out_dir,
                           int threads, int max_iter = 4);

} // namespace nfbc
