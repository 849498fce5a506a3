#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "nfbc/grid.hpp"

namespace nfbc {

struct Aabb {
  double lo[3] = {0, 0, 0};
  double hi[3] = {0, 0, 0};
  bool intersects(const Aabb& o) const {
    for (int a = 0; a < 3; ++a)
      if (lo[a] > o.hi[a] || hi[a] < o.lo[a]) return false;
    return true;
  }
};

class Shape {
 public:
  virtual ~Shape() = default;
  virtual bool contains(double x, double y, double z) const = 0;
  virtual Aabb bounds() const = 0;
};

inline bool contains(const Shape& s, double x, double y, double z) {
  return s.contains(x, y, z);
}

struct Sphere final : Shape {
  double cx = 0, cy = 0, cz = 0, radius = 0;
  Sphere(double x, double y, double z, double r) : cx(x), cy(y), cz(z), radius(r) {}
  bool contains(double x, double y, double z) const override {
    const double dx = x - cx, dy = y - cy, dz = z - cz;
    return dx * dx + dy * dy + dz * dz <= radius * radius;
  }
  Aabb bounds() const override {
    return {{cx - radius, cy - radius, cz - radius},
            {cx + radius, cy + radius, cz + radius}};
  }
};

// Axis-aligned finite cylinder; axis is 0 (x), 1 (y) or 2 (z).
struct Cylinder final : Shape {
  int axis = 0;
  double cx = 0, cy = 0, cz = 0, radius = 0, half_length = 0;
  Cylinder(int ax, double x, double y, double z, double r, double hl)
      : axis(ax), cx(x), cy(y), cz(z), radius(r), half_length(hl) {}
  bool contains(double x, double y, double z) const override {
    const double d[3] = {x - cx, y - cy, z - cz};
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    if (std::abs(d[axis]) > half_length) return false;
    return d[u] * d[u] + d[v] * d[v] <= radius * radius;
  }
  Aabb bounds() const override {
    double e[3] = {radius, radius, radius};
    e[axis] = half_length;
    return {{cx - e[0], cy - e[1], cz - e[2]}, {cx + e[0], cy + e[1], cz + e[2]}};
  }
};

// Convex hull of a vertex cloud, stored as bounding planes. Construction is
// a brute-force scan over vertex triples; fine for the few hundred vertices
// used here and free of tricky incremental-hull degeneracies.
struct ConvexPolyhedron final : Shape {
  struct Plane {
    double nx, ny, nz, d; // n.p <= d inside
  };
  std::vector<std::array<double, 3>> vertices;
  std::vector<Plane> planes;
  double tol = 0;

  explicit ConvexPolyhedron(std::vector<std::array<double, 3>> verts);
  bool contains(double x, double y, double z) const override;
  Aabb bounds() const override;
};

// base minus the union of the cut shapes
struct Difference final : Shape {
  std::shared_ptr<const Shape> base;
  std::vector<std::shared_ptr<const Shape>> cuts;
  std::vector<Aabb> cut_bounds;

  Difference(std::shared_ptr<const Shape> b,
             std::vector<std::shared_ptr<const Shape>> c);
  bool contains(double x, double y, double z) const override;
  Aabb bounds() const override { return base->bounds(); }
};

// Grating milled into a fiber: grooves_per_side cylindrical grooves on each
// side of a central gap, repeated at `period` along the fiber axis, cut at
// three azimuths (top and both sides); each groove cylinder is oriented
// perpendicular to the fiber axis with its deepest point `depth` below the
// fiber surface.
struct GratingSpec {
  std::size_t grooves_per_side = 0;
  double period = 273e-9;
  double groove_radius = 0; // 0 -> period / 4
  double depth = 30e-9;
  double gap = 592.5e-9;
};

// Fiber along x with the grating pattern applied, as a single fast shape.
// Equivalent to Difference(fiber cylinder, all groove cylinders) but with
// O(1) groove lookup by position.
struct GroovedFiber final : Shape {
  double cy = 0, cz = 0, radius = 0, half_length = 0;
  GratingSpec grating;
  double groove_r = 0, axis_offset = 0;

  GroovedFiber(double cy_, double cz_, double radius_, double half_length_,
               const GratingSpec& gs);
  bool contains(double x, double y, double z) const override;
  Aabb bounds() const override {
    return {{-half_length, cy - radius, cz - radius},
            {half_length, cy + radius, cz + radius}};
  }
  // x-extent of the milled region on both sides (gap + grooves), for fit checks
  double grating_span() const {
    if (grating.grooves_per_side == 0) return 0.0;
    return grating.gap + 2.0 * double(grating.grooves_per_side) * grating.period;
  }
};

struct SceneItem {
  std::shared_ptr<const Shape> shape;
  double eps_r = 1.0;
};

// Ordered shape list over a uniform background; the last item containing a
// point decides its permittivity.
struct Scene {
  double background_eps = 1.0;
  std::vector<SceneItem> items;
  double eps_at(double x, double y, double z) const {
    double e = background_eps;
    for (const auto& it : items)
      if (it.shape->contains(x, y, z)) e = it.eps_r;
    return e;
  }
};

enum class NdKind { Sphere, Polyhedron };

// Nanodiamond of the given size (outer diameter) centered at (cx,cy,cz).
// Polyhedral particles are convex hulls of `vertex_count` points seeded on
// the circumscribing sphere; the same seed always yields the same shape.
std::shared_ptr<const Shape> build_nanodiamond(double size, NdKind kind,
                                               std::uint64_t seed, int vertex_count,
                                               double cx, double cy, double cz);

// The grooved fiber for a Bragg-cavity scenario (pass grooves_per_side == 0
// for the bare fiber). Throws ConfigError on out-of-range grating controls.
std::shared_ptr<const Shape> build_nfbc_shapes(double fiber_radius,
                                               double fiber_half_length,
                                               const GratingSpec& grating);

// Fill the grid's E-node update coefficients from the scene: each node's
// permittivity is the arithmetic mean over supersample^3 points spread
// through the node's dual cell.
void rasterize(const Scene& scene, YeeGrid& g, int supersample);

// Relative permittivity seen by E component `comp` (0=x,1=y,2=z), derived
// from the update coefficients; used by dumps and tests.
Array3 eps_r_array(const YeeGrid& g, int comp);

} // namespace nfbc
