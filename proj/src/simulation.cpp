#include "nfbc/simulation.hpp"

#include <chrono>
#include <cmath>

#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

namespace {

double probe_mag(const YeeGrid& g, const std::array<std::size_t, 3>& p) {
  const auto e = colocated_e(g, p[0], p[1], p[2]);
  return std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
}

void validate_probe(const GridSpec& s, const std::array<std::size_t, 3>& p) {
  if (p[0] >= s.nx || p[1] >= s.ny || p[2] >= s.nz)
    throw ConfigError("run probe cell outside the grid");
}

double hann(std::size_t i, std::size_t n) {
  if (n < 2) return 1.0;
  return 0.5 * (1.0 - std::cos(2.0 * pi * double(i) / double(n - 1)));
}

void feed(Monitors& mon, const YeeGrid& g, double w) {
  for (auto* m : mon.dft) m->accumulate(g, w);
  for (auto* m : mon.flux) m->accumulate(g, w);
}

void record_probes(Monitors& mon, const YeeGrid& g) {
  for (auto* p : mon.probes) p->maybe_record(g);
}

} // namespace

RunStats run_cw(YeeGrid& g, CpmlState& pml, const std::vector<Source*>& sources,
                SlabPool& pool, const TimeEnvelope& env, const CwOptions& opt,
                Monitors& mon) {
  if (env.kind != TimeEnvelope::Kind::RampedCw)
    throw ConfigError("run_cw needs a RampedCw envelope");
  if (!(opt.max_time > env.ramp_time()))
    throw ConfigError("cw max_time must exceed the source ramp time");
  if (!(opt.measure_cycles >= 1)) throw ConfigError("measure_cycles must be >= 1");
  validate_probe(g.spec, opt.probe);

  const auto t0 = std::chrono::steady_clock::now();
  const double period = env.carrier_wavelength / c0;
  const std::size_t need =
      std::size_t(std::llround(env.ramp_cycles)) + opt.min_extra_cycles;

  std::vector<double> cyc_max;
  double current_max = 0;
  std::size_t current_cycle = 0;
  RunStats st;
  st.termination = "max_time_reached";

  // --- ring-up ---
  for (;;) {
    step(g, pml, sources, pool);
    ++st.steps;
    record_probes(mon, g);
    if (st.steps % opt.check_every == 0) check_fields_finite(g);
    const double t = double(g.time_index) * g.dt;
    const auto cyc = std::size_t(t / period);
    const double m = probe_mag(g, opt.probe);
    if (cyc != current_cycle) {
      cyc_max.push_back(current_max);
      current_max = 0;
      current_cycle = cyc;
      const std::size_t k = cyc_max.size();
      if (k >= need && k >= 11) {
        const double mk = cyc_max[k - 1];
        if (mk > 0 && std::abs(mk - cyc_max[k - 6]) <= opt.conv_tol * mk &&
            std::abs(mk - cyc_max[k - 11]) <= opt.conv_tol * mk) {
          st.termination = "converged";
          break;
        }
      }
    }
    if (m > current_max) current_max = m;
    if (t >= opt.max_time) break; // keep "max_time_reached", measure anyway
  }

  // --- Hann-windowed measurement ---
  const auto meas =
      std::size_t(std::llround(opt.measure_cycles * period / g.dt));
  for (std::size_t i = 0; i < meas; ++i) {
    step(g, pml, sources, pool);
    ++st.steps;
    record_probes(mon, g);
    feed(mon, g, hann(i, meas));
    if (st.steps % opt.check_every == 0) check_fields_finite(g);
  }
  check_fields_finite(g);
  for (auto* m : mon.dft) m->finalize();
  for (auto* m : mon.flux) m->finalize();

  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

RunStats run_pulsed(YeeGrid& g, CpmlState& pml, const std::vector<Source*>& sources,
                    SlabPool& pool, const TimeEnvelope& env, const PulsedOptions& opt,
                    Monitors& mon) {
  if (!(opt.max_time > 0)) throw ConfigError("pulsed max_time must be positive");
  if (opt.sample_stride == 0) throw ConfigError("sample_stride must be >= 1");
  validate_probe(g.spec, opt.probe);

  const auto t0 = std::chrono::steady_clock::now();
  const double period = env.carrier_wavelength / c0;

  RunStats st;
  st.termination = opt.decay_threshold > 0 ? "max_time_reached" : "fixed_time";
  double peak = 0, current_max = 0;
  std::size_t current_cycle = 0;

  for (;;) {
    step(g, pml, sources, pool);
    ++st.steps;
    record_probes(mon, g);
    if (st.steps % opt.sample_stride == 0) feed(mon, g, 1.0);
    if (st.steps % opt.check_every == 0) check_fields_finite(g);
    const double t = double(g.time_index) * g.dt;
    const double m = probe_mag(g, opt.probe);
    if (m > current_max) current_max = m;
    const auto cyc = std::size_t(t / period);
    if (cyc != current_cycle) {
      if (current_max > peak) peak = current_max;
      if (opt.decay_threshold > 0 && t >= opt.min_time && peak > 0 &&
          current_max <= opt.decay_threshold * peak) {
        st.termination = "decayed";
        break;
      }
      current_max = 0;
      current_cycle = cyc;
    }
    if (t >= opt.max_time) break;
  }
  check_fields_finite(g);
  const double dts = g.dt * double(opt.sample_stride);
  for (auto* m : mon.dft) m->finalize_spectral(dts);
  for (auto* m : mon.flux) m->finalize_spectral(dts);

  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

} // namespace nfbc
