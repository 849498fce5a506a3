#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nfbc/grid.hpp"

namespace nfbc {

// Instantaneous E averaged to the cell center (i+1/2, j+1/2, k+1/2).
std::array<double, 3> colocated_e(const YeeGrid& g, std::size_t i, std::size_t j,
                                  std::size_t k);

struct Spectrum {
  std::vector<double> wavelengths;
  std::vector<double> values;
};

struct FieldSample {
  double ex_mag = 0, ey_mag = 0, ez_mag = 0, e_mag = 0;
};

// Running discrete Fourier transform of the cell-centered E field over an
// index box [lo, hi) of cells, at a list of vacuum wavelengths. Call
// accumulate() once per completed step with the window weight for that
// sample; amplitudes become valid after finalize(): F = 2 acc / sum(w),
// the complex amplitude of Re[F e^{-i omega t}].
class DftVolumeMonitor {
 public:
  DftVolumeMonitor(const GridSpec& spec, std::array<std::size_t, 3> lo,
                   std::array<std::size_t, 3> hi, std::vector<double> wavelengths);

  void accumulate(const YeeGrid& g, double window);
  void finalize();
  // For pulsed runs: F = acc * dt_sample (a true spectral density, so ratios
  // between runs of different lengths are meaningful).
  void finalize_spectral(double dt_sample);
  bool finalized() const { return finalized_; }

  const std::vector<double>& wavelengths() const { return wavelengths_; }
  std::array<std::size_t, 3> lo() const { return lo_; }
  std::array<std::size_t, 3> hi() const { return hi_; }

  // comp: 0=Ex 1=Ey 2=Ez; (i,j,k) are absolute cell indices inside the box
  std::complex<double> amp(std::size_t lam, int comp, std::size_t i,
                           std::size_t j, std::size_t k) const;

  // Trilinear interpolation of the component magnitudes between cell centers
  // (physical coordinates; clamped to the box).
  FieldSample field_at(std::size_t lam, double x, double y, double z) const;

  // One row per cell center along `axis` through (c1, c2) — the other two
  // coordinates in grid order. Columns: position_m, e_mag, ex_mag, ey_mag,
  // ez_mag.
  void export_cutline(std::size_t lam, int axis, double c1, double c2,
                      const std::string& path) const;

 private:
  GridSpec spec_;
  std::array<std::size_t, 3> lo_, hi_;
  std::vector<double> wavelengths_;
  std::vector<double> omegas_;
  std::vector<std::complex<double>> acc_; // [(lam*3 + comp)*ncells + cell]
  double wsum_ = 0;
  bool finalized_ = false;

  std::size_t ncells() const;
  std::size_t cell_index(std::size_t i, std::size_t j, std::size_t k) const;
};

// Time-averaged power through the +x side of a constant-x plane over the
// cell rectangle [j0, j1) x [k0, k1), per wavelength. E and H are averaged
// to the plane's cell centers and each is Fourier transformed at its own
// sample time (E at n dt, H at (n - 1/2) dt).
class FluxMonitor {
 public:
  FluxMonitor(const GridSpec& spec, std::size_t plane_i, std::size_t j0,
              std::size_t j1, std::size_t k0, std::size_t k1,
              std::vector<double> wavelengths);

  void accumulate(const YeeGrid& g, double window);
  void finalize();
  void finalize_spectral(double dt_sample);
  bool finalized() const { return finalized_; }

  std::size_t plane_i() const { return plane_i_; }
  Spectrum flux_spectrum() const;

 private:
  GridSpec spec_;
  std::size_t plane_i_, j0_, j1_, k0_, k1_;
  std::vector<double> wavelengths_;
  std::vector<double> omegas_;
  // per lam, per plane cell: co-located Ey, Ez, Hy, Hz accumulators
  std::vector<std::complex<double>> ey_, ez_, hy_, hz_;
  double wsum_ = 0;
  bool finalized_ = false;

  std::size_t ncells() const { return (j1_ - j0_) * (k1_ - k0_); }
};

// Per-wavelength ratio of two flux spectra on the same wavelength list.
Spectrum transmission(const Spectrum& sample, const Spectrum& reference);

// Instantaneous co-located E at one cell center, recorded every `stride`
// completed steps.
class PointProbe {
 public:
  PointProbe(const GridSpec& spec, std::size_t ci, std::size_t cj, std::size_t ck,
             std::size_t stride = 1);

  void maybe_record(const YeeGrid& g);

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& ex() const { return ex_; }
  const std::vector<double>& ey() const { return ey_; }
  const std::vector<double>& ez() const { return ez_; }

 private:
  std::size_t ci_, cj_, ck_, stride_;
  std::vector<double> t_, ex_, ey_, ez_;
};

} // namespace nfbc
