#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"
#include "nfbc/geometry.hpp"
#include "nfbc/grid.hpp"

using namespace nfbc;

TEST_CASE("primitive shapes answer membership and bounds") {
  Sphere s(1e-6, 2e-6, 3e-6, 0.5e-6);
  CHECK(s.contains(1e-6, 2e-6, 3e-6));
  CHECK(s.contains(1.49e-6, 2e-6, 3e-6));
  CHECK_FALSE(s.contains(1.51e-6, 2e-6, 3e-6));
  CHECK(s.bounds().lo[0] == doctest::Approx(0.5e-6));
  CHECK(s.bounds().hi[2] == doctest::Approx(3.5e-6));

  Cylinder c(1, 0, 0, 0, 100e-9, 1e-6); // axis along y
  CHECK(c.contains(0, 0.99e-6, 0));
  CHECK_FALSE(c.contains(0, 1.01e-6, 0));
  CHECK(c.contains(99e-9, 0.5e-6, 0));
  CHECK_FALSE(c.contains(80e-9, 0.5e-6, 80e-9)); // radial distance > r
  CHECK(c.bounds().hi[1] == doctest::Approx(1e-6));
  CHECK(c.bounds().hi[0] == doctest::Approx(100e-9));
}

TEST_CASE("convex hull of a cube behaves like the cube") {
  std::vector<std::array<double, 3>> v;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) v.push_back({sx * 1e-6, sy * 1e-6, sz * 1e-6});
  ConvexPolyhedron p(v);
  CHECK(p.planes.size() >= 6);
  CHECK(p.contains(0, 0, 0));
  CHECK(p.contains(0.99e-6, 0.99e-6, 0.99e-6));
  CHECK_FALSE(p.contains(1.01e-6, 0, 0));
  CHECK_FALSE(p.contains(0, 0, -1.01e-6));
  CHECK(p.bounds().lo[0] == doctest::Approx(-1e-6));

  std::vector<std::array<double, 3>> tri = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(ConvexPolyhedron{tri}, ConfigError);
}

TEST_CASE("difference removes cut regions only") {
  auto base = std::make_shared<Sphere>(0, 0, 0, 1e-6);
  auto hole = std::make_shared<Sphere>(0.8e-6, 0, 0, 0.3e-6);
  Difference d(base, {hole});
  CHECK(d.contains(0, 0, 0));
  CHECK_FALSE(d.contains(0.8e-6, 0, 0));
  CHECK(d.contains(-0.8e-6, 0, 0));
  CHECK_FALSE(d.contains(1.2e-6, 0, 0));
}

TEST_CASE("seeded polyhedral nanodiamond is deterministic and round") {
  const double size = 50e-9;
  auto a = build_nanodiamond(size, NdKind::Polyhedron, 7, 120, 0, 0, 0);
  auto b = build_nanodiamond(size, NdKind::Polyhedron, 7, 120, 0, 0, 0);
  auto c = build_nanodiamond(size, NdKind::Polyhedron, 8, 120, 0, 0, 0);
  const auto* pa = dynamic_cast<const ConvexPolyhedron*>(a.get());
  const auto* pb = dynamic_cast<const ConvexPolyhedron*>(b.get());
  const auto* pc = dynamic_cast<const ConvexPolyhedron*>(c.get());
  REQUIRE(pa); REQUIRE(pb); REQUIRE(pc);
  REQUIRE(pa->vertices.size() == 120);
  bool identical = true;
  for (std::size_t i = 0; i < 120; ++i)
    for (int ax = 0; ax < 3; ++ax)
      if (pa->vertices[i][ax] != pb->vertices[i][ax]) identical = false;
  CHECK(identical);
  bool differs = false;
  for (std::size_t i = 0; i < 120; ++i)
    if (pa->vertices[i][0] != pc->vertices[i][0]) differs = true;
  CHECK(differs);

  for (const auto& vtx : pa->vertices) {
    const double r = std::sqrt(vtx[0] * vtx[0] + vtx[1] * vtx[1] + vtx[2] * vtx[2]);
    CHECK(r == doctest::Approx(25e-9).epsilon(1e-12));
  }
  CHECK(pa->contains(0, 0, 0));
  for (int ax = 0; ax < 3; ++ax)
    for (int sgn : {-1, 1}) {
      double pt[3] = {0, 0, 0};
      pt[ax] = sgn * 0.85 * 25e-9;
      CHECK(pa->contains(pt[0], pt[1], pt[2]));
      pt[ax] = sgn * 1.01 * 25e-9;
      CHECK_FALSE(pa->contains(pt[0], pt[1], pt[2]));
    }

  auto sph = build_nanodiamond(size, NdKind::Sphere, 0, 0, 1e-6, 0, 0);
  CHECK(sph->contains(1e-6 + 24e-9, 0, 0));
  CHECK_FALSE(sph->contains(1e-6 + 26e-9, 0, 0));
}

TEST_CASE("grooved fiber equals the explicit boolean construction") {
  GratingSpec gs;
  gs.grooves_per_side = 3;
  gs.period = 273e-9;
  gs.depth = 30e-9;
  gs.gap = 592.5e-9;
  const double R = 150e-9, HL = 2e-6;
  GroovedFiber fast(0, 0, R, HL, gs);

  const double rg = gs.period / 4.0;
  const double off = R + rg - gs.depth;
  auto base = std::make_shared<Cylinder>(0, 0.0, 0.0, 0.0, R, HL);
  std::vector<std::shared_ptr<const Shape>> cuts;
  for (int side = -1; side <= 1; side += 2)
    for (std::size_t j = 0; j < gs.grooves_per_side; ++j) {
      const double xc = side * (0.5 * gs.gap + (double(j) + 0.5) * gs.period);
      cuts.push_back(std::make_shared<Cylinder>(2, xc, off, 0.0, rg, R + rg));
      cuts.push_back(std::make_shared<Cylinder>(1, xc, 0.0, off, rg, R + rg));
      cuts.push_back(std::make_shared<Cylinder>(1, xc, 0.0, -off, rg, R + rg));
    }
  Difference ref(base, cuts);

  std::size_t checked = 0, inside = 0, in_plain = 0;
  for (int ix = -60; ix <= 60; ++ix)
    for (int iy = -10; iy <= 10; ++iy)
      for (int iz = -10; iz <= 10; ++iz) {
        const double x = ix * 30e-9, y = iy * 16e-9, z = iz * 16e-9;
        const bool a = fast.contains(x, y, z);
        const bool b = ref.contains(x, y, z);
        REQUIRE(a == b);
        ++checked;
        if (a) ++inside;
        if (base->contains(x, y, z)) ++in_plain;
      }
  CHECK(checked == 121 * 21 * 21);
  CHECK(inside > 1000);     // the fiber body is sampled
  CHECK(inside < in_plain); // and grooves removed material

  // without grooves the shape is the plain cylinder
  GratingSpec none;
  GroovedFiber bare(0, 0, R, HL, none);
  for (int iy = -10; iy <= 10; ++iy)
    for (int iz = -10; iz <= 10; ++iz) {
      const double y = iy * 16e-9, z = iz * 16e-9;
      CHECK(bare.contains(1e-6, y, z) == base->contains(1e-6, y, z));
    }
  CHECK(fast.grating_span() ==
        doctest::Approx(gs.gap + 6.0 * gs.period).epsilon(1e-12));
  CHECK(bare.grating_span() == 0.0);
}

TEST_CASE("grating controls are validated") {
  GratingSpec gs;
  gs.grooves_per_side = 201;
  CHECK_THROWS_AS(GroovedFiber(0, 0, 150e-9, 1e-6, gs), ConfigError);
  gs = GratingSpec{};
  gs.grooves_per_side = 5;
  gs.groove_radius = 200e-9; // diameter > period
  CHECK_THROWS_AS(GroovedFiber(0, 0, 150e-9, 1e-6, gs), ConfigError);
  gs = GratingSpec{};
  gs.grooves_per_side = 5;
  gs.depth = 400e-9; // deeper than the fiber
  CHECK_THROWS_AS(GroovedFiber(0, 0, 150e-9, 1e-6, gs), ConfigError);
}

namespace {
GridSpec raster_spec(std::size_t n, double d) {
  GridSpec s;
  s.nx = s.ny = s.nz = n;
  s.dx = s.dy = s.dz = d;
  s.origin_x = -0.5 * double(n) * d;
  s.origin_y = -0.5 * double(n) * d;
  s.origin_z = -0.5 * double(n) * d;
  s.courant_factor = 0.99;
  return s;
}
} // namespace

TEST_CASE("rasterizing a uniform scene is exact") {
  YeeGrid g(raster_spec(8, 10e-9));
  Scene sc;
  sc.background_eps = 2.25;
  rasterize(sc, g, 3);
  const double expect = g.dt / (eps0 * 2.25);
  for (const Array3* a : {&g.cex, &g.cey, &g.cez})
    for (double v : a->v) CHECK(v == doctest::Approx(expect).epsilon(1e-15));
  const Array3 er = eps_r_array(g, 1);
  CHECK(er(3, 3, 3) == doctest::Approx(2.25).epsilon(1e-13));
}

TEST_CASE("cells straddling a flat interface get the exact sample fraction") {
  YeeGrid g(raster_spec(12, 10e-9));
  // dielectric block filling x < 53nm-from-origin; its other faces lie far
  // outside the grid so only the x face cuts cells
  std::vector<std::array<double, 3>> v;
  const double x1 = g.spec.origin_x + 53e-9;
  for (double X : {g.spec.origin_x - 1e-6, x1})
    for (double Y : {-1e-6, 1e-6})
      for (double Z : {-1e-6, 1e-6}) v.push_back({X, Y, Z});
  Scene sc;
  sc.items.push_back({std::make_shared<ConvexPolyhedron>(v), 2.25});
  rasterize(sc, g, 4);

  // Ex node at i=5 sits at x=55nm from origin; supersamples at 51.25,
  // 53.75, 56.25, 58.75 -> exactly one of four inside the block
  const double eps_expect = (2.25 + 3.0 * 1.0) / 4.0;
  CHECK(eps_r_array(g, 0)(5, 6, 6) == doctest::Approx(eps_expect).epsilon(1e-12));
  // far inside / outside are pure
  CHECK(eps_r_array(g, 0)(1, 6, 6) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(eps_r_array(g, 0)(9, 6, 6) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rasterized sphere carries the right amount of material") {
  const double r = 25e-9, eps_in = 5.8;
  YeeGrid g(raster_spec(24, 5e-9));
  Scene sc;
  sc.items.push_back({std::make_shared<Sphere>(0, 0, 0, r), eps_in});
  rasterize(sc, g, 4);
  const double dv = 5e-9 * 5e-9 * 5e-9;
  const Array3 er = eps_r_array(g, 0);
  double excess = 0;
  for (double v : er.v) excess += (v - 1.0) * dv;
  const double analytic = (eps_in - 1.0) * 4.0 / 3.0 * pi * r * r * r;
  CHECK(excess == doctest::Approx(analytic).epsilon(0.02));
}
