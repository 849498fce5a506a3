#include "nfbc/fiber_mode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

namespace {

void validate(const StepFiberSpec& s) {
  if (!(s.core_radius > 0)) throw ConfigError("fiber core_radius must be positive");
  if (!(s.wavelength > 0)) throw ConfigError("fiber wavelength must be positive");
  if (!(s.n_clad > 0)) throw ConfigError("fiber n_clad must be positive");
  if (!(s.n_core > s.n_clad))
    throw ConfigError("fiber n_core must exceed n_clad for a guided mode");
}

double j1p(double x) { return std::cyl_bessel_j(0, x) - std::cyl_bessel_j(1, x) / x; }
double k1p(double x) { return -(std::cyl_bessel_k(0, x) + std::cyl_bessel_k(1, x) / x); }

// Characteristic function of the l=1 hybrid modes, parametrized by the core
// argument u (w follows from u^2 + w^2 = V^2). Zero at the HE11 root.
double char_f(const StepFiberSpec& s, double v, double u) {
  const double w = std::sqrt(v * v - u * u);
  const double k0a = 2.0 * pi / s.wavelength * s.core_radius;
  const double neff2 = s.n_core * s.n_core - (u / k0a) * (u / k0a);
  const double aj = j1p(u) / (u * std::cyl_bessel_j(1, u));
  const double ak = k1p(w) / (w * std::cyl_bessel_k(1, w));
  const double q = 1.0 / (u * u) + 1.0 / (w * w);
  return (aj + ak) * (s.n_core * s.n_core * aj + s.n_clad * s.n_clad * ak) -
         neff2 * q * q;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre polynomial.
struct Quadrature {
  std::vector<double> x, w;
};

Quadrature gauss_legendre(int n) {
  Quadrature q;
  q.x.assign(std::size_t(n), 0.0);
  q.w.assign(std::size_t(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
          p0 = p1;
          p1 = p2;
        }
        dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    q.x[std::size_t(i)] = -x;
    q.x[std::size_t(n - 1 - i)] = x;
    q.w[std::size_t(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    q.w[std::size_t(n - 1 - i)] = q.w[std::size_t(i)];
  }
  return q;
}

const Quadrature& gl64() {
  static const Quadrature q = gauss_legendre(64);
  return q;
}

// Radial shape f(r), f(r)/r and f'(r), continuous at r = a.
struct RadialShape {
  double f, f_over_r, fp, kt2, eps;
};

RadialShape shape_at(const ModeSolution& m, double r) {
  const double a = m.spec.core_radius;
  RadialShape s{};
  if (r <= a) {
    const double x = m.u * r / a;
    s.kt2 = (m.u / a) * (m.u / a);
    s.eps = eps0 * m.spec.n_core * m.spec.n_core;
    if (x < 1e-8) {
      s.f = 0.5 * x;
      s.f_over_r = 0.5 * m.u / a;
      s.fp = 0.5 * m.u / a;
    } else {
      s.f = std::cyl_bessel_j(1, x);
      s.f_over_r = s.f / r;
      s.fp = (m.u / a) * j1p(x);
    }
  } else {
    const double x = m.w * r / a;
    const double scale = std::cyl_bessel_j(1, m.u) / std::cyl_bessel_k(1, m.w);
    s.kt2 = -(m.w / a) * (m.w / a);
    s.eps = eps0 * m.spec.n_clad * m.spec.n_clad;
    s.f = scale * std::cyl_bessel_k(1, x);
    s.f_over_r = s.f / r;
    s.fp = scale * (m.w / a) * k1p(x);
  }
  return s;
}

// Axial Poynting density integrated over azimuth: (pi/2) * radial integrand.
double radial_power_integrand(const ModeSolution& m, double aa, double bb, double r) {
  const RadialShape s = shape_at(m, r);
  const double om = 2.0 * pi * c0 / m.spec.wavelength;
  const double pr = aa * s.fp + (om * mu0 / m.beta) * bb * s.f_over_r;
  const double pf = -aa * s.f_over_r - (om * mu0 / m.beta) * bb * s.fp;
  const double qr = bb * s.fp + (om * s.eps / m.beta) * aa * s.f_over_r;
  const double qf = bb * s.f_over_r + (om * s.eps / m.beta) * aa * s.fp;
  return m.beta * m.beta / (s.kt2 * s.kt2) * (pr * qf - pf * qr) * r;
}

double integrate_panel(const ModeSolution& m, double aa, double bb, double lo,
                       double hi) {
  const Quadrature& q = gl64();
  const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
  double acc = 0;
  for (std::size_t i = 0; i < q.x.size(); ++i)
    acc += q.w[i] * radial_power_integrand(m, aa, bb, mid + half * q.x[i]);
  return acc * half;
}

double mode_power(const ModeSolution& m, double aa, double bb) {
  const double a = m.spec.core_radius;
  double total = integrate_panel(m, aa, bb, 0.0, a);
  const double efold = a / m.w; // cladding decay length of the field
  double lo = a;
  for (double edge : {2.0, 6.0, 16.0}) {
    const double hi = a + edge * efold;
    total += integrate_panel(m, aa, bb, lo, hi);
    lo = hi;
  }
  return 0.5 * pi * total;
}

} // namespace

double v_number(const StepFiberSpec& spec) {
  validate(spec);
  return 2.0 * pi / spec.wavelength * spec.core_radius *
         std::sqrt(spec.n_core * spec.n_core - spec.n_clad * spec.n_clad);
}

ModeSolution solve_he11(const StepFiberSpec& spec, double power_watts) {
  validate(spec);
  if (!(power_watts > 0)) throw ConfigError("mode power must be positive");
  const double v = v_number(spec);
  const double k0a = 2.0 * pi / spec.wavelength * spec.core_radius;

  // The HE11 root is the lowest l=1 root; it lies below both V and the first
  // zero of J1 (3.8317...), so restrict the scan to that window.
  const double u_hi = std::min(v * (1.0 - 1e-9), 3.79);
  const double u_lo = u_hi * 1e-7;
  const int scan = 4000;
  double ua = u_lo, fa = char_f(spec, v, ua);
  double ub = 0, fb = 0;
  bool bracketed = false;
  for (int i = 1; i <= scan; ++i) {
    ub = u_lo + (u_hi - u_lo) * double(i) / double(scan);
    fb = char_f(spec, v, ub);
    if (std::isfinite(fa) && std::isfinite(fb) && fa * fb <= 0.0) {
      bracketed = true;
      break;
    }
    ua = ub;
    fa = fb;
  }
  if (!bracketed)
    throw NumericalError("HE11 characteristic equation: no sign change found "
                         "(V = " + std::to_string(v) + ")");
  for (int it = 0; it < 200; ++it) {
    const double um = 0.5 * (ua + ub);
    const double fm = char_f(spec, v, um);
    if (fa * fm <= 0.0) {
      ub = um;
      fb = fm;
    } else {
      ua = um;
      fa = fm;
    }
    if (ub - ua < 1e-16 * u_hi) break;
  }

  ModeSolution m;
  m.spec = spec;
  m.u = 0.5 * (ua + ub);
  m.w = std::sqrt(v * v - m.u * m.u);
  m.neff = std::sqrt(spec.n_core * spec.n_core - (m.u / k0a) * (m.u / k0a));
  m.beta = m.neff * 2.0 * pi / spec.wavelength;
  m.residual = std::abs(char_f(spec, v, m.u));
  m.single_mode = v < 2.405;

  const double om = 2.0 * pi * c0 / spec.wavelength;
  const double aj = j1p(m.u) / (m.u * std::cyl_bessel_j(1, m.u));
  const double ak = k1p(m.w) / (m.w * std::cyl_bessel_k(1, m.w));
  m.b_over_a = -(m.beta / (om * mu0)) *
               (1.0 / (m.u * m.u) + 1.0 / (m.w * m.w)) / (aj + ak);

  const double p_unit = mode_power(m, 1.0, m.b_over_a);
  if (!(p_unit > 0))
    throw NumericalError("HE11 normalization produced non-positive power");
  m.a_long = std::sqrt(power_watts / p_unit);
  m.b_long = m.a_long * m.b_over_a;
  m.power = power_watts;
  return m;
}

double ModeFields::e_mag() const {
  return std::sqrt(std::norm(ex) + std::norm(ey) + std::norm(ez));
}

ModeFields ModeSolution::fields_at(double y, double z) const {
  const double r = std::hypot(y, z);
  double cosp = 1.0, sinp = 0.0;
  if (r > spec.core_radius * 1e-12) {
    cosp = y / r;
    sinp = z / r;
  }
  const RadialShape s = shape_at(*this, r);
  const double om = 2.0 * pi * c0 / spec.wavelength;

  const double er = beta / s.kt2 * (a_long * s.fp + (om * mu0 / beta) * b_long * s.f_over_r) * cosp;
  const double ef = beta / s.kt2 * (-a_long * s.f_over_r - (om * mu0 / beta) * b_long * s.fp) * sinp;
  const double hr = beta / s.kt2 * (b_long * s.fp + (om * s.eps / beta) * a_long * s.f_over_r) * sinp;
  const double hf = beta / s.kt2 * (b_long * s.f_over_r + (om * s.eps / beta) * a_long * s.fp) * cosp;

  ModeFields out;
  out.ex = std::complex<double>(0.0, -a_long * s.f * cosp);
  out.hx = std::complex<double>(0.0, -b_long * s.f * sinp);
  out.ey = er * cosp - ef * sinp;
  out.ez = er * sinp + ef * cosp;
  out.hy = hr * cosp - hf * sinp;
  out.hz = hr * sinp + hf * cosp;
  return out;
}

ModePortProfiles sample_mode_on_plane(const ModeSolution& mode, const YeeGrid& g,
                                      std::size_t plane_i, double power) {
  const GridSpec& sp = g.spec;
  if (plane_i < 1 || plane_i + 1 >= sp.nx)
    throw ConfigError("mode port plane must be interior to the grid");
  if (!(power > 0)) throw ConfigError("mode port power must be positive");
  const std::size_t ny = sp.ny, nz = sp.nz;
  ModePortProfiles p;
  p.ny = ny;
  p.nz = nz;
  p.ey.assign(ny * (nz + 1), {});
  p.hz.assign(ny * (nz + 1), {});
  p.ez.assign((ny + 1) * nz, {});
  p.hy.assign((ny + 1) * nz, {});

  for (std::size_t k = 0; k <= nz; ++k)
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = sp.origin_y + (double(j) + 0.5) * sp.dy;
      const double z = sp.origin_z + double(k) * sp.dz;
      const ModeFields f = mode.fields_at(y, z);
      p.ey[k * ny + j] = f.ey;
      p.hz[k * ny + j] = f.hz;
    }
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j <= ny; ++j) {
      const double y = sp.origin_y + double(j) * sp.dy;
      const double z = sp.origin_z + (double(k) + 0.5) * sp.dz;
      const ModeFields f = mode.fields_at(y, z);
      p.ez[k * (ny + 1) + j] = f.ez;
      p.hy[k * (ny + 1) + j] = f.hy;
    }

  // Co-located discrete flux through the plane, matching the monitor's
  // transverse averaging to cell centers.
  double flux = 0;
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j) {
      const auto eyc = 0.5 * (p.ey[k * ny + j] + p.ey[(k + 1) * ny + j]);
      const auto ezc = 0.5 * (p.ez[k * (ny + 1) + j] + p.ez[k * (ny + 1) + j + 1]);
      const auto hzc = 0.5 * (p.hz[k * ny + j] + p.hz[(k + 1) * ny + j]);
      const auto hyc = 0.5 * (p.hy[k * (ny + 1) + j] + p.hy[k * (ny + 1) + j + 1]);
      flux += 0.5 * (eyc * std::conj(hzc) - ezc * std::conj(hyc)).real() * sp.dy * sp.dz;
    }
  p.discrete_flux = flux;
  if (!(flux > 0))
    throw NumericalError("mode port discrete flux is not positive; widen the "
                         "transverse window");

  const double s = std::sqrt(power / flux);
  const std::complex<double> hphase =
      s * std::exp(std::complex<double>(0.0, -mode.beta * 0.5 * sp.dx));
  for (auto& v : p.ey) v *= s;
  for (auto& v : p.ez) v *= s;
  for (auto& v : p.hy) v *= hphase;
  for (auto& v : p.hz) v *= hphase;
  return p;
}

PlaneWavePort make_mode_port(const ModeSolution& mode, const YeeGrid& g,
                             std::size_t plane_i, double power,
                             const TimeEnvelope& env) {
  if (std::abs(env.carrier_wavelength - mode.spec.wavelength) >
      1e-9 * mode.spec.wavelength)
    throw ConfigError("mode port envelope carrier must match the mode wavelength");
  ModePortProfiles p = sample_mode_on_plane(mode, g, plane_i, power);
  return PlaneWavePort(plane_i, env, std::move(p.ey), std::move(p.ez),
                       std::move(p.hy), std::move(p.hz), p.ny, p.nz);
}

} // namespace nfbc
