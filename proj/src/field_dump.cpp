#include "nfbc/field_dump.hpp"

#include <cstring>
#include <fstream>

#include "nfbc/errors.hpp"
#include "nfbc/geometry.hpp"

namespace nfbc {

namespace {

// The build targets little-endian hosts only (checked in one test); plain
// byte copies of the in-memory representation implement the format.
void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}
std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw IoError("truncated dump: " + path);
  return v;
}
double get_f64(std::ifstream& in, const std::string& path) {
  double v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw IoError("truncated dump: " + path);
  return v;
}

} // namespace

void write_nfb1(const std::string& path, const DumpHeader& h, const Array3& a) {
  if (std::size_t(h.nx) * h.ny * h.nz != a.size())
    throw IoError("dump header dims do not match array size for " + path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write("NFB1", 4);
  put_u32(out, h.version);
  put_u32(out, h.nx);
  put_u32(out, h.ny);
  put_u32(out, h.nz);
  put_f64(out, h.dx);
  put_f64(out, h.dy);
  put_f64(out, h.dz);
  put_f64(out, h.origin_x);
  put_f64(out, h.origin_y);
  put_f64(out, h.origin_z);
  put_u32(out, h.component);
  out.write(reinterpret_cast<const char*>(a.data()),
            static_cast<std::streamsize>(a.size() * sizeof(double)));
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

Array3 read_nfb1(const std::string& path, DumpHeader& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dump: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "NFB1", 4) != 0)
    throw IoError("bad magic in dump: " + path);
  h.version = get_u32(in, path);
  if (h.version != 1) throw IoError("unsupported dump version in " + path);
  h.nx = get_u32(in, path);
  h.ny = get_u32(in, path);
  h.nz = get_u32(in, path);
  h.dx = get_f64(in, path);
  h.dy = get_f64(in, path);
  h.dz = get_f64(in, path);
  h.origin_x = get_f64(in, path);
  h.origin_y = get_f64(in, path);
  h.origin_z = get_f64(in, path);
  h.component = get_u32(in, path);
  Array3 a(h.nx, h.ny, h.nz);
  if (!in.read(reinterpret_cast<char*>(a.data()),
               static_cast<std::streamsize>(a.size() * sizeof(double))))
    throw IoError("truncated payload in dump: " + path);
  return a;
}

std::vector<std::string> dump_grid_fields(const YeeGrid& g, const std::string& dir) {
  // Staggered offsets (in cell units) of each component's first node.
  struct Item {
    const char* name;
    const Array3* a;
    double ox, oy, oz;
  };
  const Array3 epsx = eps_r_array(g, 0), epsy = eps_r_array(g, 1), epsz = eps_r_array(g, 2);
  const Item items[9] = {
      {"field_ex.nfb1", &g.ex, 0.5, 0.0, 0.0}, {"field_ey.nfb1", &g.ey, 0.0, 0.5, 0.0},
      {"field_ez.nfb1", &g.ez, 0.0, 0.0, 0.5}, {"field_hx.nfb1", &g.hx, 0.0, 0.5, 0.5},
      {"field_hy.nfb1", &g.hy, 0.5, 0.0, 0.5}, {"field_hz.nfb1", &g.hz, 0.5, 0.5, 0.0},
      {"eps_x.nfb1", &epsx, 0.5, 0.0, 0.0},    {"eps_y.nfb1", &epsy, 0.0, 0.5, 0.0},
      {"eps_z.nfb1", &epsz, 0.0, 0.0, 0.5}};
  std::vector<std::string> names;
  for (std::uint32_t c = 0; c < 9; ++c) {
    const Item& it = items[c];
    DumpHeader h;
    h.nx = static_cast<std::uint32_t>(it.a->nx);
    h.ny = static_cast<std::uint32_t>(it.a->ny);
    h.nz = static_cast<std::uint32_t>(it.a->nz);
    h.dx = g.spec.dx;
    h.dy = g.spec.dy;
    h.dz = g.spec.dz;
    h.origin_x = g.spec.origin_x + it.ox * g.spec.dx;
    h.origin_y = g.spec.origin_y + it.oy * g.spec.dy;
    h.origin_z = g.spec.origin_z + it.oz * g.spec.dz;
    h.component = c;
    write_nfb1(dir + "/" + it.name, h, *it.a);
    names.push_back(it.name);
  }
  return names;
}

} // namespace nfbc
