#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nfbc/array3.hpp"

namespace nfbc {

class SlabPool;
struct CpmlState;
class Source;

// Uniform rectilinear mesh of nx*ny*nz cells. origin_* is the physical
// coordinate of the integer grid node (0,0,0); cell (i,j,k) spans
// [origin + i*dx, origin + (i+1)*dx] etc.
struct GridSpec {
  std::size_t nx = 0, ny = 0, nz = 0;
  double dx = 0, dy = 0, dz = 0;
  double origin_x = 0, origin_y = 0, origin_z = 0;
  double courant_factor = 0.99;
};

// Stable time step for the standard second-order staggered update:
//   dt = factor / (c0 * sqrt(1/dx^2 + 1/dy^2 + 1/dz^2))
double courant_dt(const GridSpec& spec);

// Staggered-grid state. Component positions (in units of the cell size,
// relative to integer node (i,j,k)) and array dimensions:
//   Ex at (i+1/2, j,     k    ), dims (nx,   ny+1, nz+1)
//   Ey at (i,     j+1/2, k    ), dims (nx+1, ny,   nz+1)
//   Ez at (i,     j,     k+1/2), dims (nx+1, ny+1, nz  )
//   Hx at (i,     j+1/2, k+1/2), dims (nx+1, ny,   nz  )
//   Hy at (i+1/2, j,     k+1/2), dims (nx,   ny+1, nz  )
//   Hz at (i+1/2, j+1/2, k    ), dims (nx,   ny,   nz+1)
// The outermost boundary carries tangential E; those nodes are never
// written by the update, which realizes perfect-electric-conductor walls.
//
// cex/cey/cez hold the premultiplied update coefficient dt/(eps0*eps_r)
// sampled at the corresponding E node; relative permittivity is recoverable
// as eps_r = dt / (eps0 * ce).
struct YeeGrid {
  GridSpec spec;
  double dt = 0;
  std::int64_t time_index = 0; // completed steps; E at time_index*dt

  Array3 ex, ey, ez, hx, hy, hz;
  Array3 cex, cey, cez;

  explicit YeeGrid(const GridSpec& s);

  // Physical coordinates of component nodes.
  double x_of(std::size_t i) const { return spec.origin_x + double(i) * spec.dx; }
  double y_of(std::size_t j) const { return spec.origin_y + double(j) * spec.dy; }
  double z_of(std::size_t k) const { return spec.origin_z + double(k) * spec.dz; }

  // Relative permittivity seen by one E component node.
  double eps_r_at(const Array3& ce, std::size_t i, std::size_t j, std::size_t k) const;
};

struct EnergyReport {
  double electric = 0; // joules, sum of eps/2 * E^2 * cell volume
  double magnetic = 0; // joules, sum of mu0/2 * H^2 * cell volume
  double total = 0;
  std::int64_t time_index = 0;
};

// Instantaneous field energy; serial fixed-order summation.
EnergyReport total_energy(const YeeGrid& g);

// Advance one full time step: H update (+ boundary-layer convolution terms,
// + source H-phase), then E update (+ convolution, + source E-phase).
// `pml` may be an empty CpmlState (no absorbing layers -> PEC box).
void step(YeeGrid& g, CpmlState& pml, const std::vector<Source*>& sources,
          SlabPool& pool);

// Scan all six field arrays for the first non-finite or absurdly large
// (|v| > 1e30) value, in component order Ex,Ey,Ez,Hx,Hy,Hz, x-fastest.
// Throws NumericalError naming the component and cell if one is found.
void check_fields_finite(const YeeGrid& g);

} // namespace nfbc
