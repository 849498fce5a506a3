#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "nfbc/cpml.hpp"
#include "nfbc/grid.hpp"
#include "nfbc/monitor.hpp"
#include "nfbc/source.hpp"
#include "nfbc/thread_pool.hpp"

namespace nfbc {

struct RunStats {
  std::size_t steps = 0;
  double wall_seconds = 0;
  std::string termination;
};

struct Monitors {
  std::vector<DftVolumeMonitor*> dft;
  std::vector<FluxMonitor*> flux;
  std::vector<PointProbe*> probes;
};

// Two-phase continuous-wave run. Ring-up: steps until the per-cycle maximum
// of |E| at the probe cell has settled (both the 5- and 10-cycle-old maxima
// within conv_tol of the current one, evaluated only after the source ramp
// plus min_extra_cycles), or until max_time — whichever first; hitting the
// cap is reported as "max_time_reached", not an error. Measurement: a Hann
// window over measure_cycles carrier cycles feeding every monitor, after
// which they are finalized.
struct CwOptions {
  double max_time = 0; // required: hard cap on the ring-up time [s]
  double measure_cycles = 25;
  double conv_tol = 0.01;
  std::size_t min_extra_cycles = 20;
  std::array<std::size_t, 3> probe{0, 0, 0};
  std::size_t check_every = 200;
};

RunStats run_cw(YeeGrid& g, CpmlState& pml, const std::vector<Source*>& sources,
                SlabPool& pool, const TimeEnvelope& env, const CwOptions& opt,
                Monitors& mon);

// Broadband pulsed run: monitors accumulate every sample_stride steps with
// unit weight from the start and are finalized as spectral densities. Ends
// when the per-cycle maximum of |E| at the probe falls below
// decay_threshold times its historical peak (after min_time), or at
// max_time ("fixed_time" when the decay test is disabled with threshold 0).
struct PulsedOptions {
  double max_time = 0;
  double decay_threshold = 1e-4;
  double min_time = 0;
  std::array<std::size_t, 3> probe{0, 0, 0};
  std::size_t sample_stride = 1;
  std::size_t check_every = 200;
};

RunStats run_pulsed(YeeGrid& g, CpmlState& pml, const std::vector<Source*>& sources,
                    SlabPool& pool, const TimeEnvelope& env, const PulsedOptions& opt,
                    Monitors& mon);

} // namespace nfbc
