#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nfbc/array3.hpp"
#include "nfbc/grid.hpp"

namespace nfbc {

// Convolutional PML controls. Conductivity is graded polynomially from 0 at
// the inner interface to sigma_max at the outer wall,
//   sigma(d) = sigma_max * (d/D)^m,
//   sigma_max = -(m+1) * ln(r0) * c0 * eps0 / (2*D),
// with d the depth into the layer and D its total thickness. kappa follows
// the same profile from 1 to kappa_max; the frequency-shift parameter alpha
// is graded linearly from alpha_max at the interface to 0 at the outer wall.
struct CpmlSpec {
  std::size_t thickness = 10; // cells per face
  double m = 3.0;             // grading order
  double r0 = 1e-8;           // target normal-incidence reflection
  double kappa_max = 5.0;
  double alpha_max = 5.0e3;   // S/m
  // Faces carrying an absorbing layer; others remain bare PEC walls.
  bool xmin = true, xmax = true, ymin = true, ymax = true, zmin = true, zmax = true;
};

// Recursive-convolution accumulator for one face and one field component.
// The array spans the layer along the face axis (offset `lo` in global
// node index) and the component's full extent in the other two axes.
struct PsiSlab {
  Array3 a;
  std::size_t lo = 0;
};

// Per-axis update coefficients, indexed by global node position along that
// axis. *_e rows apply at integer positions (E-node derivatives), *_h rows
// at half positions. Interior entries are identity (b=1, c=0, 1/kappa=1).
struct CpmlAxis {
  std::vector<double> b_e, c_e, inv_kappa_e; // size n+1
  std::vector<double> b_h, c_h, inv_kappa_h; // size n
};

struct CpmlState {
  CpmlSpec spec;
  bool active = false;
  CpmlAxis ax, ay, az;

  // psi accumulators, [0]=min face, [1]=max face of the named axis.
  // x-normal faces damp d/dx terms appearing in Ey, Ez, Hy, Hz; etc.
  std::array<PsiSlab, 2> x_ey, x_ez, x_hy, x_hz;
  std::array<PsiSlab, 2> y_ex, y_ez, y_hx, y_hz;
  std::array<PsiSlab, 2> z_ex, z_ey, z_hx, z_hy;
};

// Build coefficient tables and zeroed accumulators for `grid_spec` with the
// time step the grid will actually use. Throws ConfigError if the layers do
// not fit (each axis needs at least 4 interior cells between faces) or the
// controls are out of range (m in [2,4], kappa_max >= 1, thickness >= 4
// when a face is enabled).
CpmlState make_cpml(const GridSpec& grid_spec, const CpmlSpec& pml_spec);

// Empty state: no layers, plain PEC box.
CpmlState no_pml();

// Broadband absorption measurement for one axis-aligned layer pair.
// Launches a guided pulse down a PEC-walled duct toward an x-max layer and
// compares against a reference duct extended by `extra_cells`; the runs are
// bitwise identical until the reflected wave re-enters the probe region, so
// the difference isolates the reflection exactly. Returns the reflection
// coefficient in dB (negative; e.g. -60 means power ratio 1e-6) at the
// requested vacuum wavelengths.
std::vector<double> measured_reflection(const CpmlSpec& pml_spec,
                                        const std::vector<double>& wavelengths,
                                        double mesh_step);

} // namespace nfbc
