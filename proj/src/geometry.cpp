#include "nfbc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

ConvexPolyhedron::ConvexPolyhedron(std::vector<std::array<double, 3>> verts)
    : vertices(std::move(verts)) {
  const std::size_t n = vertices.size();
  if (n < 4) throw ConfigError("convex polyhedron needs at least 4 vertices");
  double scale = 0;
  for (const auto& v : vertices)
    scale = std::max({scale, std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
  tol = 1e-12 * std::max(scale, 1e-300);

  // Every vertex triple whose plane supports the whole cloud is a face.
  for (std::size_t i = 0; i + 2 < n; ++i)
    for (std::size_t j = i + 1; j + 1 < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto &a = vertices[i], &b = vertices[j], &c = vertices[k];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        double nx = uy * vz - uz * vy;
        double ny = uz * vx - ux * vz;
        double nz = ux * vy - uy * vx;
        const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (len < 1e-20 * scale * scale) continue;
        nx /= len; ny /= len; nz /= len;
        const double d = nx * a[0] + ny * a[1] + nz * a[2];
        bool all_below = true, all_above = true;
        for (const auto& p : vertices) {
          const double s = nx * p[0] + ny * p[1] + nz * p[2] - d;
          if (s > tol) all_below = false;
          if (s < -tol) all_above = false;
          if (!all_below && !all_above) break;
        }
        if (all_below)
          planes.push_back({nx, ny, nz, d});
        else if (all_above)
          planes.push_back({-nx, -ny, -nz, -d});
      }
  if (planes.empty())
    throw ConfigError("degenerate vertex cloud: no supporting planes found");
}

bool ConvexPolyhedron::contains(double x, double y, double z) const {
  for (const Plane& p : planes)
    if (p.nx * x + p.ny * y + p.nz * z > p.d + tol) return false;
  return true;
}

Aabb ConvexPolyhedron::bounds() const {
  Aabb b{{vertices[0][0], vertices[0][1], vertices[0][2]},
         {vertices[0][0], vertices[0][1], vertices[0][2]}};
  for (const auto& v : vertices)
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], v[a]);
      b.hi[a] = std::max(b.hi[a], v[a]);
    }
  return b;
}

Difference::Difference(std::shared_ptr<const Shape> b,
                       std::vector<std::shared_ptr<const Shape>> c)
    : base(std::move(b)), cuts(std::move(c)) {
  if (!base) throw ConfigError("difference shape needs a base");
  cut_bounds.reserve(cuts.size());
  for (const auto& s : cuts) cut_bounds.push_back(s->bounds());
}

bool Difference::contains(double x, double y, double z) const {
  if (!base->contains(x, y, z)) return false;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const Aabb& bb = cut_bounds[i];
    if (x < bb.lo[0] || x > bb.hi[0] || y < bb.lo[1] || y > bb.hi[1] ||
        z < bb.lo[2] || z > bb.hi[2])
      continue;
    if (cuts[i]->contains(x, y, z)) return false;
  }
  return true;
}

namespace {
void validate_grating(const GratingSpec& gs) {
  if (gs.grooves_per_side > 200)
    throw ConfigError("grooves_per_side must be at most 200");
  if (gs.grooves_per_side == 0) return;
  if (!(gs.period > 0)) throw ConfigError("grating period must be positive");
  if (!(gs.depth > 0)) throw ConfigError("groove depth must be positive");
  if (gs.gap < 0) throw ConfigError("grating gap must be nonnegative");
  const double rg = gs.groove_radius > 0 ? gs.groove_radius : gs.period / 4.0;
  if (2.0 * rg > gs.period)
    throw ConfigError("groove diameter exceeds the grating period");
}
} // namespace

GroovedFiber::GroovedFiber(double cy_, double cz_, double radius_,
                           double half_length_, const GratingSpec& gs)
    : cy(cy_), cz(cz_), radius(radius_), half_length(half_length_), grating(gs) {
  if (!(radius > 0)) throw ConfigError("fiber radius must be positive");
  validate_grating(gs);
  groove_r = gs.groove_radius > 0 ? gs.groove_radius : gs.period / 4.0;
  if (gs.grooves_per_side > 0 && gs.depth >= 2.0 * radius)
    throw ConfigError("groove depth exceeds the fiber diameter");
  axis_offset = radius + groove_r - gs.depth;
}

bool GroovedFiber::contains(double x, double y, double z) const {
  const double dy = y - cy, dz = z - cz;
  if (dy * dy + dz * dz > radius * radius) return false;
  if (std::abs(x) > half_length) return false;
  const std::size_t N = grating.grooves_per_side;
  if (N == 0) return true;

  const double ax = std::abs(x);
  const double u = ax - 0.5 * grating.gap;
  if (u < -groove_r) return true;
  long j = std::lround(std::floor(u / grating.period));
  for (long jj = j - 1; jj <= j + 1; ++jj) {
    if (jj < 0 || jj >= long(N)) continue;
    const double xc = 0.5 * grating.gap + (double(jj) + 0.5) * grating.period;
    const double ddx = ax - xc;
    if (std::abs(ddx) > groove_r) continue;
    // top groove: axis along z at height +axis_offset above the fiber axis
    const double dty = dy - axis_offset;
    if (ddx * ddx + dty * dty <= groove_r * groove_r) return false;
    // side grooves: axes along y at +-axis_offset in z
    const double dsp = dz - axis_offset, dsm = dz + axis_offset;
    if (ddx * ddx + dsp * dsp <= groove_r * groove_r) return false;
    if (ddx * ddx + dsm * dsm <= groove_r * groove_r) return false;
  }
  return true;
}

std::shared_ptr<const Shape> build_nanodiamond(double size, NdKind kind,
                                               std::uint64_t seed, int vertex_count,
                                               double cx, double cy, double cz) {
  if (!(size > 0)) throw ConfigError("nanodiamond size must be positive");
  const double r = 0.5 * size;
  if (kind == NdKind::Sphere) return std::make_shared<Sphere>(cx, cy, cz, r);

  if (vertex_count < 4)
    throw ConfigError("polyhedral nanodiamond needs at least 4 vertices");
  // Uniform points on the circumscribing sphere. Raw generator bits are
  // mapped to doubles explicitly so the shape is identical on every
  // platform for a given seed.
  std::mt19937_64 rng(seed);
  auto u01 = [&rng]() { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; };
  std::vector<std::array<double, 3>> verts;
  verts.reserve(std::size_t(vertex_count));
  while (verts.size() < std::size_t(vertex_count)) {
    // Box-Muller; three coordinates from two pairs
    const double r1 = std::sqrt(-2.0 * std::log(u01()));
    const double a1 = 2.0 * pi * u01();
    const double r2 = std::sqrt(-2.0 * std::log(u01()));
    const double a2 = 2.0 * pi * u01();
    const double g[3] = {r1 * std::cos(a1), r1 * std::sin(a1), r2 * std::cos(a2)};
    const double len = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if (len < 1e-12) continue;
    verts.push_back({cx + r * g[0] / len, cy + r * g[1] / len, cz + r * g[2] / len});
  }
  return std::make_shared<ConvexPolyhedron>(std::move(verts));
}

std::shared_ptr<const Shape> build_nfbc_shapes(double fiber_radius,
                                               double fiber_half_length,
                                               const GratingSpec& grating) {
  return std::make_shared<GroovedFiber>(0.0, 0.0, fiber_radius, fiber_half_length,
                                        grating);
}

namespace {

// supersample offsets through one dual cell, in units of the cell size
std::vector<double> sample_offsets(int s) {
  std::vector<double> o(static_cast<std::size_t>(s), 0.0);
  for (int m = 0; m < s; ++m) o[std::size_t(m)] = (double(m) + 0.5) / double(s) - 0.5;
  return o;
}

void fill_component(const Scene& scene, YeeGrid& g, Array3& ce, double ox, double oy,
                    double oz, int s) {
  const GridSpec& sp = g.spec;
  const auto off = sample_offsets(s);
  const double inv_n = 1.0 / double(s * s * s);
  std::vector<Aabb> item_bounds;
  item_bounds.reserve(scene.items.size());
  for (const auto& it : scene.items) item_bounds.push_back(it.shape->bounds());
  const double ce_bg = g.dt / (eps0 * scene.background_eps);

  for (std::size_t k = 0; k < ce.nz; ++k) {
    const double z = g.z_of(0) + (double(k) + oz) * sp.dz;
    for (std::size_t j = 0; j < ce.ny; ++j) {
      const double y = g.y_of(0) + (double(j) + oy) * sp.dy;
      for (std::size_t i = 0; i < ce.nx; ++i) {
        const double x = g.x_of(0) + (double(i) + ox) * sp.dx;
        Aabb cell{{x - 0.5 * sp.dx, y - 0.5 * sp.dy, z - 0.5 * sp.dz},
                  {x + 0.5 * sp.dx, y + 0.5 * sp.dy, z + 0.5 * sp.dz}};
        bool near = false;
        for (const auto& bb : item_bounds)
          if (cell.intersects(bb)) {
            near = true;
            break;
          }
        if (!near) {
          ce(i, j, k) = ce_bg;
          continue;
        }
        double acc = 0;
        for (double fz : off) {
          const double pz = z + fz * sp.dz;
          for (double fy : off) {
            const double py = y + fy * sp.dy;
            for (double fx : off) acc += scene.eps_at(x + fx * sp.dx, py, pz);
          }
        }
        ce(i, j, k) = g.dt / (eps0 * (acc * inv_n));
      }
    }
  }
}

} // namespace

void rasterize(const Scene& scene, YeeGrid& g, int supersample) {
  if (supersample < 1) throw ConfigError("supersample factor must be at least 1");
  if (scene.background_eps <= 0) throw ConfigError("background permittivity must be positive");
  for (const auto& it : scene.items)
    if (it.eps_r <= 0) throw ConfigError("relative permittivity must be positive");
  fill_component(scene, g, g.cex, 0.5, 0.0, 0.0, supersample);
  fill_component(scene, g, g.cey, 0.0, 0.5, 0.0, supersample);
  fill_component(scene, g, g.cez, 0.0, 0.0, 0.5, supersample);
}

Array3 eps_r_array(const YeeGrid& g, int comp) {
  const Array3& ce = comp == 0 ? g.cex : comp == 1 ? g.cey : g.cez;
  Array3 out(ce.nx, ce.ny, ce.nz);
  for (std::size_t n = 0; n < ce.size(); ++n) out.v[n] = g.dt / (eps0 * ce.v[n]);
  return out;
}

} // namespace nfbc
