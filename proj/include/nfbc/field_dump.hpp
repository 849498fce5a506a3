#pragma once

#include <cstdint>
#include <string>

#include "nfbc/array3.hpp"
#include "nfbc/grid.hpp"

namespace nfbc {

// Raw little-endian array dump, one component per file:
//   "NFB1" | version u32 | nx ny nz u32 | dx dy dz f64 | origin x y z f64 |
//   component id u32 | nx*ny*nz f64 values, x-fastest.
// The dims/origin are those of the component's own staggered node lattice,
// not the cell grid. Component ids: 0..5 = Ex,Ey,Ez,Hx,Hy,Hz and
// 6..8 = relative permittivity sampled at the Ex/Ey/Ez nodes.
struct DumpHeader {
  std::uint32_t version = 1;
  std::uint32_t nx = 0, ny = 0, nz = 0;
  double dx = 0, dy = 0, dz = 0;
  double origin_x = 0, origin_y = 0, origin_z = 0;
  std::uint32_t component = 0;
};

void write_nfb1(const std::string& path, const DumpHeader& header, const Array3& a);

// Reads and sanity-checks one dump (magic, version, payload size).
Array3 read_nfb1(const std::string& path, DumpHeader& header);

// The nine standard dumps for a grid ("field_ex.nfb1", ..., "eps_z.nfb1"),
// written into `dir`; returns the file names.
std::vector<std::string> dump_grid_fields(const YeeGrid& g, const std::string& dir);

} // namespace nfbc
