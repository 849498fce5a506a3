#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nfbc/grid.hpp"
#include "nfbc/source.hpp"

namespace nfbc {

// Step-index cylindrical waveguide, axis along +x of the grid.
struct StepFiberSpec {
  double core_radius = 150e-9;
  double n_core = 1.46;
  double n_clad = 1.0;
  double wavelength = 532e-9;
};

double v_number(const StepFiberSpec& spec);

struct ModeFields {
  std::complex<double> ex, ey, ez; // ex is the longitudinal component
  std::complex<double> hx, hy, hz;
  double e_mag() const;
};

// Exact vector HE11 solution. Amplitudes are normalized so the mode carries
// `power` watts in +x; fields_at() evaluates the transverse profile (the
// phase reference plane is x = 0).
struct ModeSolution {
  StepFiberSpec spec;
  double neff = 0;
  double beta = 0;
  double u = 0; // core transverse parameter
  double w = 0; // cladding decay parameter
  double b_over_a = 0; // longitudinal H/E amplitude ratio
  double a_long = 0;   // longitudinal E amplitude (after normalization)
  double b_long = 0;
  double residual = 0; // characteristic-equation mismatch at the root
  double power = 0;
  bool single_mode = false;

  ModeFields fields_at(double y, double z) const;
};

ModeSolution solve_he11(const StepFiberSpec& spec, double power_watts = 1.0);

// Yee-sampled port profiles for the mode crossing the plane x = x(plane_i).
// H samples live half a cell upstream and carry the matching exp(-i beta
// dx/2) phase. Profiles are rescaled so the co-located discrete flux equals
// `power` exactly; `discrete_flux` reports the flux before rescaling.
struct ModePortProfiles {
  std::vector<std::complex<double>> ey, ez, hy, hz;
  std::size_t ny = 0, nz = 0;
  double discrete_flux = 0;
};

ModePortProfiles sample_mode_on_plane(const ModeSolution& mode, const YeeGrid& g,
                                      std::size_t plane_i, double power);

PlaneWavePort make_mode_port(const ModeSolution& mode, const YeeGrid& g,
                             std::size_t plane_i, double power,
                             const TimeEnvelope& env);

} // namespace nfbc
