#include "nfbc/source.hpp"

#include <cmath>

#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

double TimeEnvelope::omega() const { return 2.0 * pi * c0 / carrier_wavelength; }

double TimeEnvelope::ramp_time() const {
  return kind == Kind::RampedCw ? ramp_cycles * carrier_wavelength / c0 : 0.0;
}

double TimeEnvelope::envelope(double t) const {
  if (kind == Kind::RampedCw) {
    if (t <= 0.0) return 0.0;
    const double tr = ramp_time();
    if (t >= tr) return 1.0;
    const double s = std::sin(0.5 * pi * t / tr);
    return s * s;
  }
  const double u = (t - pulse_center) / pulse_sigma;
  return std::exp(-0.5 * u * u);
}

double TimeEnvelope::value(double t, double phase) const {
  return envelope(t) * std::cos(omega() * t + phase);
}

PlaneWavePort::PlaneWavePort(std::size_t plane_i, TimeEnvelope env,
                             std::vector<std::complex<double>> ey,
                             std::vector<std::complex<double>> ez,
                             std::vector<std::complex<double>> hy,
                             std::vector<std::complex<double>> hz, std::size_t ny,
                             std::size_t nz)
    : plane_i_(plane_i),
      env_(env),
      ey_(std::move(ey)),
      ez_(std::move(ez)),
      hy_(std::move(hy)),
      hz_(std::move(hz)),
      ny_(ny),
      nz_(nz) {
  if (plane_i_ < 1) throw ConfigError("source plane must have at least one cell upstream");
  if (ey_.size() != ny_ * (nz_ + 1) || hz_.size() != ny_ * (nz_ + 1) ||
      ez_.size() != (ny_ + 1) * nz_ || hy_.size() != (ny_ + 1) * nz_)
    throw ConfigError("source profile dimensions do not match the grid plane");
}

// Physical field of a phasor profile F under convention Re[F e^{-i w t}].
static inline double phys(const std::complex<double>& f, double cw, double sw) {
  return f.real() * cw + f.imag() * sw;
}

void PlaneWavePort::inject_h(YeeGrid& g, double t_e) {
  const double envf = env_.envelope(t_e);
  if (envf == 0.0) return;
  const double w = env_.omega();
  const double cw = envf * std::cos(w * t_e), sw = envf * std::sin(w * t_e);
  const double fh = g.dt / (mu0 * g.spec.dx);
  const std::size_t iu = plane_i_ - 1;
  for (std::size_t k = 0; k <= nz_; ++k)
    for (std::size_t j = 0; j < ny_; ++j)
      g.hz(iu, j, k) += fh * phys(ey_[k * ny_ + j], cw, sw);
  for (std::size_t k = 0; k < nz_; ++k)
    for (std::size_t j = 0; j <= ny_; ++j)
      g.hy(iu, j, k) -= fh * phys(ez_[k * (ny_ + 1) + j], cw, sw);
}

void PlaneWavePort::inject_e(YeeGrid& g, double t_h) {
  const double envf = env_.envelope(t_h);
  if (envf == 0.0) return;
  const double w = env_.omega();
  const double cw = envf * std::cos(w * t_h), sw = envf * std::sin(w * t_h);
  const double inv_dx = 1.0 / g.spec.dx;
  const std::size_t i0 = plane_i_;
  // Keep wall-tangential E fixed at zero (PEC walls).
  for (std::size_t k = 1; k < nz_; ++k)
    for (std::size_t j = 0; j < ny_; ++j)
      g.ey(i0, j, k) += g.cey(i0, j, k) * inv_dx * phys(hz_[k * ny_ + j], cw, sw);
  for (std::size_t k = 0; k < nz_; ++k)
    for (std::size_t j = 1; j < ny_; ++j)
      g.ez(i0, j, k) -= g.cez(i0, j, k) * inv_dx * phys(hy_[k * (ny_ + 1) + j], cw, sw);
}

SoftPatchSource::SoftPatchSource(Component c, std::size_t plane_i, std::size_t j0,
                                 std::size_t k0, std::vector<double> amplitude,
                                 std::size_t nj, std::size_t nk, TimeEnvelope env)
    : c_(c), plane_i_(plane_i), j0_(j0), k0_(k0), nj_(nj), nk_(nk),
      amp_(std::move(amplitude)), env_(env) {
  if (amp_.size() != nj_ * nk_)
    throw ConfigError("soft source amplitude map does not match its patch");
}

void SoftPatchSource::inject_e(YeeGrid& g, double t_h) {
  const double v = env_.value(t_h);
  if (v == 0.0) return;
  if (c_ == Component::Ey) {
    for (std::size_t k = 0; k < nk_; ++k)
      for (std::size_t j = 0; j < nj_; ++j)
        g.ey(plane_i_, j0_ + j, k0_ + k) += amp_[k * nj_ + j] * v;
  } else {
    for (std::size_t k = 0; k < nk_; ++k)
      for (std::size_t j = 0; j < nj_; ++j)
        g.ez(plane_i_, j0_ + j, k0_ + k) += amp_[k * nj_ + j] * v;
  }
}

PlaneWavePort make_gaussian_beam(const YeeGrid& g, std::size_t plane_i,
                                 const TimeEnvelope& env, double power,
                                 double waist_radius, double focus_distance,
                                 double y0, double z0) {
  const GridSpec& sp = g.spec;
  if (plane_i < 1 || plane_i + 1 >= sp.nx)
    throw ConfigError("beam plane must be interior to the grid");
  if (!(power > 0) || !(waist_radius > 0) || !(focus_distance > 0))
    throw ConfigError("beam power, waist and focus distance must be positive");
  const double k0 = 2.0 * pi / env.carrier_wavelength;
  const std::size_t ny = sp.ny, nz = sp.nz;

  std::vector<std::complex<double>> ey(ny * (nz + 1));
  std::vector<std::complex<double>> hz(ny * (nz + 1));
  std::vector<std::complex<double>> ez((ny + 1) * nz); // stays zero
  std::vector<std::complex<double>> hy((ny + 1) * nz); // stays zero
  const double f2 = focus_distance * focus_distance;
  for (std::size_t k = 0; k <= nz; ++k)
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = sp.origin_y + (double(j) + 0.5) * sp.dy - y0;
      const double z = sp.origin_z + double(k) * sp.dz - z0;
      const double rho2 = y * y + z * z;
      const double phase = k0 * (focus_distance - std::sqrt(f2 + rho2));
      const std::complex<double> v =
          std::exp(-rho2 / (waist_radius * waist_radius)) *
          std::complex<double>(std::cos(phase), std::sin(phase));
      ey[k * ny + j] = v;
      hz[k * ny + j] = v / eta0;
    }

  // co-located discrete flux for normalization (Ez/Hy vanish identically)
  double flux = 0;
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j) {
      const auto eyc = 0.5 * (ey[k * ny + j] + ey[(k + 1) * ny + j]);
      const auto hzc = 0.5 * (hz[k * ny + j] + hz[(k + 1) * ny + j]);
      flux += 0.5 * (eyc * std::conj(hzc)).real() * sp.dy * sp.dz;
    }
  if (!(flux > 0))
    throw NumericalError("beam discrete flux is not positive; widen the window");
  const double s = std::sqrt(power / flux);
  const std::complex<double> hphase =
      s * std::exp(std::complex<double>(0.0, -k0 * 0.5 * sp.dx));
  for (auto& v : ey) v *= s;
  for (auto& v : hz) v *= hphase;
  return PlaneWavePort(plane_i, env, std::move(ey), std::move(ez), std::move(hy),
                       std::move(hz), ny, nz);
}

} // namespace nfbc
