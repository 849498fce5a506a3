#include "nfbc/grid.hpp"

#include <cmath>
#include <sstream>

#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

double courant_dt(const GridSpec& spec) {
  if (spec.nx < 4 || spec.ny < 4 || spec.nz < 4)
    throw ConfigError("grid must be at least 4 cells along every axis");
  if (!(spec.dx > 0) || !(spec.dy > 0) || !(spec.dz > 0))
    throw ConfigError("grid cell size must be positive");
  if (!(spec.courant_factor > 0) || spec.courant_factor > 1.0)
    throw ConfigError("courant_factor must be in (0, 1]");
  const double s = std::sqrt(1.0 / (spec.dx * spec.dx) + 1.0 / (spec.dy * spec.dy) +
                             1.0 / (spec.dz * spec.dz));
  return spec.courant_factor / (c0 * s);
}

YeeGrid::YeeGrid(const GridSpec& s) : spec(s), dt(courant_dt(s)) {
  const std::size_t nx = s.nx, ny = s.ny, nz = s.nz;
  ex = Array3(nx, ny + 1, nz + 1);
  ey = Array3(nx + 1, ny, nz + 1);
  ez = Array3(nx + 1, ny + 1, nz);
  hx = Array3(nx + 1, ny, nz);
  hy = Array3(nx, ny + 1, nz);
  hz = Array3(nx, ny, nz + 1);
  const double ce_vac = dt / eps0;
  cex = Array3(nx, ny + 1, nz + 1, ce_vac);
  cey = Array3(nx + 1, ny, nz + 1, ce_vac);
  cez = Array3(nx + 1, ny + 1, nz, ce_vac);
}

double YeeGrid::eps_r_at(const Array3& ce, std::size_t i, std::size_t j,
                         std::size_t k) const {
  return dt / (eps0 * ce(i, j, k));
}

EnergyReport total_energy(const YeeGrid& g) {
  const double dv = g.spec.dx * g.spec.dy * g.spec.dz;
  double ue = 0.0;
  auto accum_e = [&](const Array3& f, const Array3& ce) {
    double s = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) {
      // eps0*eps_r = dt / ce
      s += 0.5 * (g.dt / ce.v[n]) * f.v[n] * f.v[n];
    }
    return s;
  };
  ue += accum_e(g.ex, g.cex);
  ue += accum_e(g.ey, g.cey);
  ue += accum_e(g.ez, g.cez);

  double uh = 0.0;
  for (const Array3* f : {&g.hx, &g.hy, &g.hz}) {
    double s = 0.0;
    for (std::size_t n = 0; n < f->size(); ++n) s += f->v[n] * f->v[n];
    uh += 0.5 * mu0 * s;
  }

  EnergyReport r;
  r.electric = ue * dv;
  r.magnetic = uh * dv;
  r.total = r.electric + r.magnetic;
  r.time_index = g.time_index;
  return r;
}

void check_fields_finite(const YeeGrid& g) {
  struct Named {
    const char* name;
    const Array3* a;
  };
  const Named fields[] = {{"Ex", &g.ex}, {"Ey", &g.ey}, {"Ez", &g.ez},
                          {"Hx", &g.hx}, {"Hy", &g.hy}, {"Hz", &g.hz}};
  for (const auto& f : fields) {
    const Array3& a = *f.a;
    for (std::size_t n = 0; n < a.size(); ++n) {
      const double v = a.v[n];
      if (!std::isfinite(v) || std::abs(v) > 1e30) {
        const std::size_t i = n % a.nx;
        const std::size_t j = (n / a.nx) % a.ny;
        const std::size_t k = n / (a.nx * a.ny);
        std::ostringstream os;
        os << "field " << f.name << " became "
           << (std::isfinite(v) ? "unstable" : "non-finite") << " at cell (" << i
           << ", " << j << ", " << k << ") after step " << g.time_index
           << "; check the time step against the stability bound and the "
              "source amplitudes";
        throw NumericalError(os.str());
      }
    }
  }
}

} // namespace nfbc
