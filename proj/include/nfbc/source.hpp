#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nfbc/grid.hpp"

namespace nfbc {

// Temporal drive shared by all sources. Two shapes:
//  - RampedCw: sin ramp^2 ... raised-cosine turn-on over `ramp_cycles`
//    optical cycles, then steady sinusoid at the carrier.
//  - GaussianPulse: carrier modulated by exp(-(t-t0)^2 / (2 sigma^2)),
//    for broadband spectral runs.
struct TimeEnvelope {
  enum class Kind { RampedCw, GaussianPulse };
  Kind kind = Kind::RampedCw;
  double carrier_wavelength = 532e-9; // m
  double ramp_cycles = 10.0;          // RampedCw
  double pulse_center = 0.0;          // s, GaussianPulse
  double pulse_sigma = 0.0;           // s, GaussianPulse

  double omega() const;
  // Envelope factor alone, in [0,1].
  double envelope(double t) const;
  // envelope(t) * cos(omega*t + phase).
  double value(double t, double phase = 0.0) const;
  // Time after which a RampedCw envelope is exactly 1.
  double ramp_time() const;
};

// One full step injects sources twice:
//   inject_h: after the H update; incident E is taken at the pre-update
//             E time t = n*dt.
//   inject_e: after the E update; incident H is taken at t = (n+1/2)*dt.
class Source {
 public:
  virtual ~Source() = default;
  virtual void inject_h(YeeGrid& g, double t_e) = 0;
  virtual void inject_e(YeeGrid& g, double t_h) = 0;
};

// One-way wave injection across a single constant-x plane (total-field /
// scattered-field correction on the plane's E nodes and the H nodes one
// half cell upstream). The complex transverse profiles are sampled at the
// exact staggered node positions of Ey/Ez (at x = plane) and Hy/Hz (at
// x = plane - dx/2); physical fields are Re[profile * e^{-i omega t}] times
// the envelope. Launches toward +x; the source region x < plane stays
// field-free up to discretization error.
class PlaneWavePort : public Source {
 public:
  // Profiles indexed like the (j,k) planes of the corresponding component
  // arrays: ey (ny, nz+1), ez (ny+1, nz), hy (ny+1, nz), hz (ny, nz+1).
  PlaneWavePort(std::size_t plane_i, TimeEnvelope env,
                std::vector<std::complex<double>> ey, std::vector<std::complex<double>> ez,
                std::vector<std::complex<double>> hy, std::vector<std::complex<double>> hz,
                std::size_t ny, std::size_t nz);

  void inject_h(YeeGrid& g, double t_e) override;
  void inject_e(YeeGrid& g, double t_h) override;

  std::size_t plane_i() const { return plane_i_; }

 private:
  std::size_t plane_i_;
  TimeEnvelope env_;
  std::vector<std::complex<double>> ey_, ez_, hy_, hz_;
  std::size_t ny_, nz_;
};

// Additive ("soft") current source on one E component over a rectangular
// patch of a constant-x plane; used by validation drives where a physical
// port is not needed. amplitude(j,k) scales the common time signal.
class SoftPatchSource : public Source {
 public:
  enum class Component { Ey, Ez };
  SoftPatchSource(Component c, std::size_t plane_i, std::size_t j0, std::size_t k0,
                  std::vector<double> amplitude, std::size_t nj, std::size_t nk,
                  TimeEnvelope env);

  void inject_h(YeeGrid&, double) override {}
  void inject_e(YeeGrid& g, double t_h) override;

 private:
  Component c_;
  std::size_t plane_i_, j0_, k0_, nj_, nk_;
  std::vector<double> amp_;
  TimeEnvelope env_;
};

// Converging y-polarized Gaussian beam crossing the plane toward a focus
// `focus_distance` downstream of it: amplitude exp(-rho^2/w^2) with the
// spherical phase front k0 (f - sqrt(f^2 + rho^2)). Profiles are rescaled so
// the co-located discrete flux through the plane equals `power`. Strongly
// curved wavefronts leak a few percent of the field backward through the
// plane (oblique components do not satisfy the axial E/H ratio); place
// absorbing boundaries upstream.
PlaneWavePort make_gaussian_beam(const YeeGrid& g, std::size_t plane_i,
                                 const TimeEnvelope& env, double power,
                                 double waist_radius, double focus_distance,
                                 double y0 = 0.0, double z0 = 0.0);

} // namespace nfbc
