#include <cstddef>
#include <vector>

#include "nfbc/constants.hpp"
#include "nfbc/cpml.hpp"
#include "nfbc/grid.hpp"
#include "nfbc/source.hpp"
#include "nfbc/thread_pool.hpp"

namespace nfbc {

namespace {

// Identity coefficient rows for a bare-PEC run, so the main kernels can
// unconditionally multiply by 1/kappa (exact no-op at 1.0).
void ensure_axis_tables(CpmlAxis& a, std::size_t n) {
  if (a.inv_kappa_e.size() != n + 1) {
    a.b_e.assign(n + 1, 1.0);
    a.c_e.assign(n + 1, 0.0);
    a.inv_kappa_e.assign(n + 1, 1.0);
    a.b_h.assign(n, 1.0);
    a.c_h.assign(n, 0.0);
    a.inv_kappa_h.assign(n, 1.0);
  }
}

void update_h_main(YeeGrid& g, const CpmlState& pml, SlabPool& pool) {
  const std::size_t nx = g.spec.nx, ny = g.spec.ny, nz = g.spec.nz;
  const double ch = g.dt / mu0;
  const double inv_dx = 1.0 / g.spec.dx, inv_dy = 1.0 / g.spec.dy,
               inv_dz = 1.0 / g.spec.dz;
  const double* ikx = pml.ax.inv_kappa_h.data();
  const double* iky = pml.ay.inv_kappa_h.data();
  const double* ikz = pml.az.inv_kappa_h.data();
  const int T = pool.nthreads();

  pool.run([&](int t) {
    // Hx over k in [0, nz)
    {
      auto [k0, k1] = slab_range((long)nz, t, T);
      for (long k = k0; k < k1; ++k) {
        const double fz = inv_dz * ikz[k];
        for (std::size_t j = 0; j < ny; ++j) {
          const double fy = inv_dy * iky[j];
          double* hxr = &g.hx(0, j, k);
          const double* eyk0 = &g.ey(0, j, k);
          const double* eyk1 = &g.ey(0, j, k + 1);
          const double* ezj0 = &g.ez(0, j, k);
          const double* ezj1 = &g.ez(0, j + 1, k);
          for (std::size_t i = 0; i <= nx; ++i) {
            hxr[i] += ch * ((eyk1[i] - eyk0[i]) * fz - (ezj1[i] - ezj0[i]) * fy);
          }
        }
      }
    }
    // Hy over k in [0, nz)
    {
      auto [k0, k1] = slab_range((long)nz, t, T);
      for (long k = k0; k < k1; ++k) {
        const double fz = inv_dz * ikz[k];
        for (std::size_t j = 0; j <= ny; ++j) {
          double* hyr = &g.hy(0, j, k);
          const double* ezr = &g.ez(0, j, k);
          const double* exk0 = &g.ex(0, j, k);
          const double* exk1 = &g.ex(0, j, k + 1);
          for (std::size_t i = 0; i < nx; ++i) {
            hyr[i] += ch * ((ezr[i + 1] - ezr[i]) * inv_dx * ikx[i] -
                            (exk1[i] - exk0[i]) * fz);
          }
        }
      }
    }
    // Hz over k in [0, nz]
    {
      auto [k0, k1] = slab_range((long)nz + 1, t, T);
      for (long k = k0; k < k1; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
          const double fy = inv_dy * iky[j];
          double* hzr = &g.hz(0, j, k);
          const double* exj0 = &g.ex(0, j, k);
          const double* exj1 = &g.ex(0, j + 1, k);
          const double* eyr = &g.ey(0, j, k);
          for (std::size_t i = 0; i < nx; ++i) {
            hzr[i] += ch * ((exj1[i] - exj0[i]) * fy -
                            (eyr[i + 1] - eyr[i]) * inv_dx * ikx[i]);
          }
        }
      }
    }
  });
}

void update_e_main(YeeGrid& g, const CpmlState& pml, SlabPool& pool) {
  const std::size_t nx = g.spec.nx, ny = g.spec.ny, nz = g.spec.nz;
  const double inv_dx = 1.0 / g.spec.dx, inv_dy = 1.0 / g.spec.dy,
               inv_dz = 1.0 / g.spec.dz;
  const double* ikx = pml.ax.inv_kappa_e.data();
  const double* iky = pml.ay.inv_kappa_e.data();
  const double* ikz = pml.az.inv_kappa_e.data();
  const int T = pool.nthreads();

  pool.run([&](int t) {
    // Ex over interior k in [1, nz-1]; partition the range [1, nz).
    {
      auto [k0, k1] = slab_range((long)nz - 1, t, T);
      for (long k = 1 + k0; k < 1 + k1; ++k) {
        const double fz = inv_dz * ikz[k];
        for (std::size_t j = 1; j < ny; ++j) {
          const double fy = inv_dy * iky[j];
          double* exr = &g.ex(0, j, k);
          const double* cer = &g.cex(0, j, k);
          const double* hzj1 = &g.hz(0, j, k);
          const double* hzj0 = &g.hz(0, j - 1, k);
          const double* hyk1 = &g.hy(0, j, k);
          const double* hyk0 = &g.hy(0, j, k - 1);
          for (std::size_t i = 0; i < nx; ++i) {
            exr[i] += cer[i] * ((hzj1[i] - hzj0[i]) * fy - (hyk1[i] - hyk0[i]) * fz);
          }
        }
      }
    }
    // Ey over interior k in [1, nz-1]
    {
      auto [k0, k1] = slab_range((long)nz - 1, t, T);
      for (long k = 1 + k0; k < 1 + k1; ++k) {
        const double fz = inv_dz * ikz[k];
        for (std::size_t j = 0; j < ny; ++j) {
          double* eyr = &g.ey(0, j, k);
          const double* cer = &g.cey(0, j, k);
          const double* hxk1 = &g.hx(0, j, k);
          const double* hxk0 = &g.hx(0, j, k - 1);
          const double* hzr = &g.hz(0, j, k);
          for (std::size_t i = 1; i < nx; ++i) {
            eyr[i] += cer[i] * ((hxk1[i] - hxk0[i]) * fz -
                                (hzr[i] - hzr[i - 1]) * inv_dx * ikx[i]);
          }
        }
      }
    }
    // Ez over k in [0, nz)
    {
      auto [k0, k1] = slab_range((long)nz, t, T);
      for (long k = k0; k < k1; ++k) {
        for (std::size_t j = 1; j < ny; ++j) {
          const double fy = inv_dy * iky[j];
          double* ezr = &g.ez(0, j, k);
          const double* cer = &g.cez(0, j, k);
          const double* hyr = &g.hy(0, j, k);
          const double* hxj1 = &g.hx(0, j, k);
          const double* hxj0 = &g.hx(0, j - 1, k);
          for (std::size_t i = 1; i < nx; ++i) {
            ezr[i] += cer[i] * ((hyr[i] - hyr[i - 1]) * inv_dx * ikx[i] -
                                (hxj1[i] - hxj0[i]) * fy);
          }
        }
      }
    }
  });
}

// Recursive-convolution corrections inside the absorbing layers. Serial;
// the layers are a small fraction of the volume and serial order keeps the
// result independent of the thread count.
void psi_e_pass(YeeGrid& g, CpmlState& p) {
  const std::size_t nx = g.spec.nx, ny = g.spec.ny, nz = g.spec.nz;
  const double inv_dx = 1.0 / g.spec.dx, inv_dy = 1.0 / g.spec.dy,
               inv_dz = 1.0 / g.spec.dz;

  // x faces: Ey (-dHz/dx), Ez (+dHy/dx)
  for (int f = 0; f < 2; ++f) {
    PsiSlab& sy = p.x_ey[f];
    if (sy.a.size()) {
      const std::size_t lo = sy.lo, len = sy.a.nx;
      for (std::size_t k = 1; k < nz; ++k)
        for (std::size_t j = 0; j < ny; ++j)
          for (std::size_t ii = 0; ii < len; ++ii) {
            const std::size_t i = lo + ii;
            const double d = (g.hz(i, j, k) - g.hz(i - 1, j, k)) * inv_dx;
            double& ps = sy.a(ii, j, k);
            ps = p.ax.b_e[i] * ps + p.ax.c_e[i] * d;
            g.ey(i, j, k) -= g.cey(i, j, k) * ps;
          }
    }
    PsiSlab& sz = p.x_ez[f];
    if (sz.a.size()) {
      const std::size_t lo = sz.lo, len = sz.a.nx;
      for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 1; j < ny; ++j)
          for (std::size_t ii = 0; ii < len; ++ii) {
            const std::size_t i = lo + ii;
            const double d = (g.hy(i, j, k) - g.hy(i - 1, j, k)) * inv_dx;
            double& ps = sz.a(ii, j, k);
            ps = p.ax.b_e[i] * ps + p.ax.c_e[i] * d;
            g.ez(i, j, k) += g.cez(i, j, k) * ps;
          }
    }
  }
  // y faces: Ex (+dHz/dy), Ez (-dHx/dy)
  for (int f = 0; f < 2; ++f) {
    PsiSlab& sx = p.y_ex[f];
    if (sx.a.size()) {
      const std::size_t lo = sx.lo, len = sx.a.ny;
      for (std::size_t k = 1; k < nz; ++k)
        for (std::size_t jj = 0; jj < len; ++jj) {
          const std::size_t j = lo + jj;
          const double bj = p.ay.b_e[j], cj = p.ay.c_e[j];
          for (std::size_t i = 0; i < nx; ++i) {
            const double d = (g.hz(i, j, k) - g.hz(i, j - 1, k)) * inv_dy;
            double& ps = sx.a(i, jj, k);
            ps = bj * ps + cj * d;
            g.ex(i, j, k) += g.cex(i, j, k) * ps;
          }
        }
    }
    PsiSlab& sz = p.y_ez[f];
    if (sz.a.size()) {
      const std::size_t lo = sz.lo, len = sz.a.ny;
      for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t jj = 0; jj < len; ++jj) {
          const std::size_t j = lo + jj;
          const double bj = p.ay.b_e[j], cj = p.ay.c_e[j];
          for (std::size_t i = 1; i < nx; ++i) {
            const double d = (g.hx(i, j, k) - g.hx(i, j - 1, k)) * inv_dy;
            double& ps = sz.a(i, jj, k);
            ps = bj * ps + cj * d;
            g.ez(i, j, k) -= g.cez(i, j, k) * ps;
          }
        }
    }
  }
  // z faces: Ex (-dHy/dz), Ey (+dHx/dz)
  for (int f = 0; f < 2; ++f) {
    PsiSlab& sx = p.z_ex[f];
    if (sx.a.size()) {
      const std::size_t lo = sx.lo, len = sx.a.nz;
      for (std::size_t kk = 0; kk < len; ++kk) {
        const std::size_t k = lo + kk;
        const double bk = p.az.b_e[k], ck = p.az.c_e[k];
        for (std::size_t j = 1; j < ny; ++j)
          for (std::size_t i = 0; i < nx; ++i) {
            const double d = (g.hy(i, j, k) - g.hy(i, j, k - 1)) * inv_dz;
            double& ps = sx.a(i, j, kk);
            ps = bk * ps + ck * d;
            g.ex(i, j, k) -= g.cex(i, j, k) * ps;
          }
      }
    }
    PsiSlab& sy = p.z_ey[f];
    if (sy.a.size()) {
      const std::size_t lo = sy.lo, len = sy.a.nz;
      for (std::size_t kk = 0; kk < len; ++kk) {
        const std::size_t k = lo + kk;
        const double bk = p.az.b_e[k], ck = p.az.c_e[k];
        for (std::size_t j = 0; j < ny; ++j)
          for (std::size_t i = 1; i < nx; ++i) {
            const double d = (g.hx(i, j, k) - g.hx(i, j, k - 1)) * inv_dz;
            double& ps = sy.a(i, j, kk);
            ps = bk * ps + ck * d;
            g.ey(i, j, k) += g.cey(i, j, k) * ps;
          }
      }
    }
  }
}

void psi_h_pass(YeeGrid& g, CpmlState& p) {
  const std::size_t nx = g.spec.nx, ny = g.spec.ny, nz = g.spec.nz;
  const double ch = g.dt / mu0;
  const double inv_dx = 1.0 / g.spec.dx, inv_dy = 1.0 / g.spec.dy,
               inv_dz = 1.0 / g.spec.dz;

  // x faces: Hy (+dEz/dx), Hz (-dEy/dx)
  for (int f = 0; f < 2; ++f) {
    PsiSlab& sy = p.x_hy[f];
    if (sy.a.size()) {
      const std::size_t lo = sy.lo, len = sy.a.nx;
      for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j <= ny; ++j)
          for (std::size_t ii = 0; ii < len; ++ii) {
            const std::size_t i = lo + ii;
            const double d = (g.ez(i + 1, j, k) - g.ez(i, j, k)) * inv_dx;
            double& ps = sy.a(ii, j, k);
            ps = p.ax.b_h[i] * ps + p.ax.c_h[i] * d;
            g.hy(i, j, k) += ch * ps;
          }
    }
    PsiSlab& sz = p.x_hz[f];
    if (sz.a.size()) {
      const std::size_t lo = sz.lo, len = sz.a.nx;
      for (std::size_t k = 0; k <= nz; ++k)
        for (std::size_t j = 0; j < ny; ++j)
          for (std::size_t ii = 0; ii < len; ++ii) {
            const std::size_t i = lo + ii;
            const double d = (g.ey(i + 1, j, k) - g.ey(i, j, k)) * inv_dx;
            double& ps = sz.a(ii, j, k);
            ps = p.ax.b_h[i] * ps + p.ax.c_h[i] * d;
            g.hz(i, j, k) -= ch * ps;
          }
    }
  }
  // y faces: Hx (-dEz/dy), Hz (+dEx/dy)
  for (int f = 0; f < 2; ++f) {
    PsiSlab& sx = p.y_hx[f];
    if (sx.a.size()) {
      const std::size_t lo = sx.lo, len = sx.a.ny;
      for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t jj = 0; jj < len; ++jj) {
          const std::size_t j = lo + jj;
          const double bj = p.ay.b_h[j], cj = p.ay.c_h[j];
          for (std::size_t i = 0; i <= nx; ++i) {
            const double d = (g.ez(i, j + 1, k) - g.ez(i, j, k)) * inv_dy;
            double& ps = sx.a(i, jj, k);
            ps = bj * ps + cj * d;
            g.hx(i, j, k) -= ch * ps;
          }
        }
    }
    PsiSlab& sz = p.y_hz[f];
    if (sz.a.size()) {
      const std::size_t lo = sz.lo, len = sz.a.ny;
      for (std::size_t k = 0; k <= nz; ++k)
        for (std::size_t jj = 0; jj < len; ++jj) {
          const std::size_t j = lo + jj;
          const double bj = p.ay.b_h[j], cj = p.ay.c_h[j];
          for (std::size_t i = 0; i < nx; ++i) {
            const double d = (g.ex(i, j + 1, k) - g.ex(i, j, k)) * inv_dy;
            double& ps = sz.a(i, jj, k);
            ps = bj * ps + cj * d;
            g.hz(i, j, k) += ch * ps;
          }
        }
    }
  }
  // z faces: Hx (+dEy/dz), Hy (-dEx/dz)
  for (int f = 0; f < 2; ++f) {
    PsiSlab& sx = p.z_hx[f];
    if (sx.a.size()) {
      const std::size_t lo = sx.lo, len = sx.a.nz;
      for (std::size_t kk = 0; kk < len; ++kk) {
        const std::size_t k = lo + kk;
        const double bk = p.az.b_h[k], ck = p.az.c_h[k];
        for (std::size_t j = 0; j < ny; ++j)
          for (std::size_t i = 0; i <= nx; ++i) {
            const double d = (g.ey(i, j, k + 1) - g.ey(i, j, k)) * inv_dz;
            double& ps = sx.a(i, j, kk);
            ps = bk * ps + ck * d;
            g.hx(i, j, k) += ch * ps;
          }
      }
    }
    PsiSlab& sy = p.z_hy[f];
    if (sy.a.size()) {
      const std::size_t lo = sy.lo, len = sy.a.nz;
      for (std::size_t kk = 0; kk < len; ++kk) {
        const std::size_t k = lo + kk;
        const double bk = p.az.b_h[k], ck = p.az.c_h[k];
        for (std::size_t j = 0; j <= ny; ++j)
          for (std::size_t i = 0; i < nx; ++i) {
            const double d = (g.ex(i, j, k + 1) - g.ex(i, j, k)) * inv_dz;
            double& ps = sy.a(i, j, kk);
            ps = bk * ps + ck * d;
            g.hy(i, j, k) -= ch * ps;
          }
      }
    }
  }
}

} // namespace

void step(YeeGrid& g, CpmlState& pml, const std::vector<Source*>& sources,
          SlabPool& pool) {
  ensure_axis_tables(pml.ax, g.spec.nx);
  ensure_axis_tables(pml.ay, g.spec.ny);
  ensure_axis_tables(pml.az, g.spec.nz);

  const double t_e = double(g.time_index) * g.dt;
  const double t_h = (double(g.time_index) + 0.5) * g.dt;

  update_h_main(g, pml, pool);
  if (pml.active) psi_h_pass(g, pml);
  for (Source* s : sources) s->inject_h(g, t_e);

  update_e_main(g, pml, pool);
  if (pml.active) psi_e_pass(g, pml);
  for (Source* s : sources) s->inject_e(g, t_h);

  ++g.time_index;
}

} // namespace nfbc
