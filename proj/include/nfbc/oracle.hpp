#pragma once

#include <cstddef>
#include <vector>

namespace nfbc {

// Uniform internal field of a dielectric sphere in the electrostatic limit,
// relative to the applied field: 3 / (n^2 + 2).
double quasi_static_ratio(double n_sphere);

// Exact electrodynamic internal field at the sphere center, relative to the
// incident plane-wave amplitude, from the Lorenz-Mie interior series. Only
// the n=1 electric partial wave survives at the exact center; terms_used and
// truncation_estimate document the convergence of the near-center series.
struct MieResult {
  double ratio = 0;
  std::size_t terms_used = 0;
  double truncation_estimate = 0;
};

MieResult mie_internal_ratio(double size_parameter, double m_relative);

// Characteristic-matrix transmission of a lossless planar layer stack at
// normal incidence.
struct TmmLayer {
  double n = 1.0;
  double thickness = 0.0;
};

struct TmmStack {
  double n_in = 1.0;
  double n_out = 1.0;
  std::vector<TmmLayer> layers;
};

std::vector<double> tmm_transmission(const TmmStack& stack,
                                     const std::vector<double>& wavelengths);

// Reflectance counterpart (lossless stacks satisfy T + R = 1).
std::vector<double> tmm_reflection(const TmmStack& stack,
                                   const std::vector<double>& wavelengths);

} // namespace nfbc
