#include "nfbc/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "nfbc/constants.hpp"
#include "nfbc/csv_io.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

std::array<double, 3> colocated_e(const YeeGrid& g, std::size_t i, std::size_t j,
                                  std::size_t k) {
  const double ex = 0.25 * (g.ex(i, j, k) + g.ex(i, j + 1, k) + g.ex(i, j, k + 1) +
                            g.ex(i, j + 1, k + 1));
  const double ey = 0.25 * (g.ey(i, j, k) + g.ey(i + 1, j, k) + g.ey(i, j, k + 1) +
                            g.ey(i + 1, j, k + 1));
  const double ez = 0.25 * (g.ez(i, j, k) + g.ez(i + 1, j, k) + g.ez(i, j + 1, k) +
                            g.ez(i + 1, j + 1, k));
  return {ex, ey, ez};
}

namespace {

std::vector<double> omegas_of(const std::vector<double>& wavelengths) {
  if (wavelengths.empty()) throw ConfigError("monitor needs at least one wavelength");
  std::vector<double> om;
  om.reserve(wavelengths.size());
  for (double lam : wavelengths) {
    if (!(lam > 0)) throw ConfigError("monitor wavelengths must be positive");
    om.push_back(2.0 * pi * c0 / lam);
  }
  return om;
}

} // namespace

DftVolumeMonitor::DftVolumeMonitor(const GridSpec& spec, std::array<std::size_t, 3> lo,
                                   std::array<std::size_t, 3> hi,
                                   std::vector<double> wavelengths)
    : spec_(spec), lo_(lo), hi_(hi), wavelengths_(std::move(wavelengths)),
      omegas_(omegas_of(wavelengths_)) {
  const std::size_t dims[3] = {spec.nx, spec.ny, spec.nz};
  for (int a = 0; a < 3; ++a) {
    if (lo_[std::size_t(a)] >= hi_[std::size_t(a)] || hi_[std::size_t(a)] > dims[a])
      throw ConfigError("DFT monitor box is empty or outside the grid");
  }
  acc_.assign(wavelengths_.size() * 3 * ncells(), {});
}

std::size_t DftVolumeMonitor::ncells() const {
  return (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]) * (hi_[2] - lo_[2]);
}

std::size_t DftVolumeMonitor::cell_index(std::size_t i, std::size_t j,
                                         std::size_t k) const {
  return ((k - lo_[2]) * (hi_[1] - lo_[1]) + (j - lo_[1])) * (hi_[0] - lo_[0]) +
         (i - lo_[0]);
}

void DftVolumeMonitor::accumulate(const YeeGrid& g, double window) {
  if (finalized_) throw NumericalError("DFT monitor already finalized");
  const double t = double(g.time_index) * g.dt;
  const std::size_t nc = ncells(), nlam = wavelengths_.size();
  std::vector<std::complex<double>> rot(nlam);
  for (std::size_t l = 0; l < nlam; ++l) {
    const double ph = omegas_[l] * t;
    rot[l] = window * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  for (std::size_t k = lo_[2]; k < hi_[2]; ++k)
    for (std::size_t j = lo_[1]; j < hi_[1]; ++j)
      for (std::size_t i = lo_[0]; i < hi_[0]; ++i) {
        const auto e = colocated_e(g, i, j, k);
        const std::size_t cell = cell_index(i, j, k);
        for (std::size_t l = 0; l < nlam; ++l)
          for (int c = 0; c < 3; ++c)
            acc_[(l * 3 + std::size_t(c)) * nc + cell] += e[std::size_t(c)] * rot[l];
      }
  wsum_ += window;
}

void DftVolumeMonitor::finalize() {
  if (finalized_) return;
  if (!(wsum_ > 0)) throw NumericalError("DFT monitor finalized with zero weight");
  const double s = 2.0 / wsum_;
  for (auto& a : acc_) a *= s;
  finalized_ = true;
}

void DftVolumeMonitor::finalize_spectral(double dt_sample) {
  if (finalized_) return;
  if (!(dt_sample > 0)) throw ConfigError("spectral finalize needs dt > 0");
  for (auto& a : acc_) a *= dt_sample;
  finalized_ = true;
}

std::complex<double> DftVolumeMonitor::amp(std::size_t lam, int comp, std::size_t i,
                                           std::size_t j, std::size_t k) const {
  if (!finalized_) throw NumericalError("DFT monitor not finalized");
  if (lam >= wavelengths_.size() || comp < 0 || comp > 2)
    throw ConfigError("DFT monitor amp index out of range");
  for (int a = 0; a < 3; ++a) {
    const std::size_t v = a == 0 ? i : (a == 1 ? j : k);
    if (v < lo_[std::size_t(a)] || v >= hi_[std::size_t(a)])
      throw ConfigError("DFT monitor cell outside the recorded box");
  }
  return acc_[(lam * 3 + std::size_t(comp)) * ncells() + cell_index(i, j, k)];
}

FieldSample DftVolumeMonitor::field_at(std::size_t lam, double x, double y,
                                       double z) const {
  if (!finalized_) throw NumericalError("DFT monitor not finalized");
  if (lam >= wavelengths_.size()) throw ConfigError("wavelength index out of range");
  const double pos[3] = {x, y, z};
  const double org[3] = {spec_.origin_x, spec_.origin_y, spec_.origin_z};
  const double d[3] = {spec_.dx, spec_.dy, spec_.dz};
  std::size_t i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const auto sa = std::size_t(a);
    double u = (pos[a] - org[a]) / d[a] - 0.5; // cell-center coordinate
    const double ulo = double(lo_[sa]);
    const double uhi = double(hi_[sa] - 1);
    u = std::clamp(u, ulo, uhi);
    const double fl = std::floor(u);
    i0[sa] = std::min(std::size_t(fl), hi_[sa] - 2 + (hi_[sa] - lo_[sa] == 1 ? 1 : 0));
    if (hi_[sa] - lo_[sa] == 1) {
      i0[sa] = lo_[sa];
      f[sa] = 0.0;
    } else {
      f[sa] = u - double(i0[sa]);
    }
  }
  const std::size_t nc = ncells();
  FieldSample out;
  double comps[3];
  for (int c = 0; c < 3; ++c) {
    const std::complex<double>* base = &acc_[(lam * 3 + std::size_t(c)) * nc];
    double v = 0;
    for (int dz8 = 0; dz8 < 2; ++dz8)
      for (int dy8 = 0; dy8 < 2; ++dy8)
        for (int dx8 = 0; dx8 < 2; ++dx8) {
          const std::size_t ii = std::min(i0[0] + std::size_t(dx8), hi_[0] - 1);
          const std::size_t jj = std::min(i0[1] + std::size_t(dy8), hi_[1] - 1);
          const std::size_t kk = std::min(i0[2] + std::size_t(dz8), hi_[2] - 1);
          const double wt = (dx8 ? f[0] : 1 - f[0]) * (dy8 ? f[1] : 1 - f[1]) *
                            (dz8 ? f[2] : 1 - f[2]);
          v += wt * std::abs(base[cell_index(ii, jj, kk)]);
        }
    comps[c] = v;
  }
  out.ex_mag = comps[0];
  out.ey_mag = comps[1];
  out.ez_mag = comps[2];
  out.e_mag = std::sqrt(comps[0] * comps[0] + comps[1] * comps[1] + comps[2] * comps[2]);
  return out;
}

void DftVolumeMonitor::export_cutline(std::size_t lam, int axis, double c1, double c2,
                                      const std::string& path) const {
  if (axis < 0 || axis > 2) throw ConfigError("cutline axis must be 0, 1 or 2");
  const auto sa = std::size_t(axis);
  const double org[3] = {spec_.origin_x, spec_.origin_y, spec_.origin_z};
  const double d[3] = {spec_.dx, spec_.dy, spec_.dz};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = lo_[sa]; i < hi_[sa]; ++i) {
    const double p = org[axis] + (double(i) + 0.5) * d[axis];
    double xyz[3];
    xyz[axis] = p;
    xyz[(axis + 1) % 3] = c1;
    xyz[(axis + 2) % 3] = c2;
    const FieldSample s = field_at(lam, xyz[0], xyz[1], xyz[2]);
    rows.push_back({p, s.e_mag, s.ex_mag, s.ey_mag, s.ez_mag});
  }
  write_csv(path, {"position_m", "e_mag", "ex_mag", "ey_mag", "ez_mag"}, rows);
}

FluxMonitor::FluxMonitor(const GridSpec& spec, std::size_t plane_i, std::size_t j0,
                         std::size_t j1, std::size_t k0, std::size_t k1,
                         std::vector<double> wavelengths)
    : spec_(spec), plane_i_(plane_i), j0_(j0), j1_(j1), k0_(k0), k1_(k1),
      wavelengths_(std::move(wavelengths)), omegas_(omegas_of(wavelengths_)) {
  if (plane_i_ < 1 || plane_i_ >= spec.nx)
    throw ConfigError("flux plane must be interior to the grid");
  if (j0_ >= j1_ || j1_ > spec.ny || k0_ >= k1_ || k1_ > spec.nz)
    throw ConfigError("flux window is empty or outside the grid");
  const std::size_t n = wavelengths_.size() * ncells();
  ey_.assign(n, {});
  ez_.assign(n, {});
  hy_.assign(n, {});
  hz_.assign(n, {});
}

void FluxMonitor::accumulate(const YeeGrid& g, double window) {
  if (finalized_) throw NumericalError("flux monitor already finalized");
  const double t_e = double(g.time_index) * g.dt;
  const double t_h = (double(g.time_index) - 0.5) * g.dt;
  const std::size_t nlam = wavelengths_.size(), nc = ncells(), i0 = plane_i_;
  std::vector<std::complex<double>> rot_e(nlam), rot_h(nlam);
  for (std::size_t l = 0; l < nlam; ++l) {
    rot_e[l] = window * std::complex<double>(std::cos(omegas_[l] * t_e),
                                             std::sin(omegas_[l] * t_e));
    rot_h[l] = window * std::complex<double>(std::cos(omegas_[l] * t_h),
                                             std::sin(omegas_[l] * t_h));
  }
  for (std::size_t k = k0_; k < k1_; ++k)
    for (std::size_t j = j0_; j < j1_; ++j) {
      const double eyc = 0.5 * (g.ey(i0, j, k) + g.ey(i0, j, k + 1));
      const double ezc = 0.5 * (g.ez(i0, j, k) + g.ez(i0, j + 1, k));
      const double hzc = 0.25 * (g.hz(i0 - 1, j, k) + g.hz(i0, j, k) +
                                 g.hz(i0 - 1, j, k + 1) + g.hz(i0, j, k + 1));
      const double hyc = 0.25 * (g.hy(i0 - 1, j, k) + g.hy(i0, j, k) +
                                 g.hy(i0 - 1, j + 1, k) + g.hy(i0, j + 1, k));
      const std::size_t cell = (k - k0_) * (j1_ - j0_) + (j - j0_);
      for (std::size_t l = 0; l < nlam; ++l) {
        ey_[l * nc + cell] += eyc * rot_e[l];
        ez_[l * nc + cell] += ezc * rot_e[l];
        hy_[l * nc + cell] += hyc * rot_h[l];
        hz_[l * nc + cell] += hzc * rot_h[l];
      }
    }
  wsum_ += window;
}

void FluxMonitor::finalize() {
  if (finalized_) return;
  if (!(wsum_ > 0)) throw NumericalError("flux monitor finalized with zero weight");
  const double s = 2.0 / wsum_;
  for (auto* v : {&ey_, &ez_, &hy_, &hz_})
    for (auto& c : *v) c *= s;
  finalized_ = true;
}

void FluxMonitor::finalize_spectral(double dt_sample) {
  if (finalized_) return;
  if (!(dt_sample > 0)) throw ConfigError("spectral finalize needs dt > 0");
  for (auto* v : {&ey_, &ez_, &hy_, &hz_})
    for (auto& c : *v) c *= dt_sample;
  finalized_ = true;
}

Spectrum FluxMonitor::flux_spectrum() const {
  if (!finalized_) throw NumericalError("flux monitor not finalized");
  Spectrum s;
  s.wavelengths = wavelengths_;
  const std::size_t nc = ncells();
  const double da = spec_.dy * spec_.dz;
  for (std::size_t l = 0; l < wavelengths_.size(); ++l) {
    double p = 0;
    for (std::size_t c = 0; c < nc; ++c)
      p += 0.5 * (ey_[l * nc + c] * std::conj(hz_[l * nc + c]) -
                  ez_[l * nc + c] * std::conj(hy_[l * nc + c]))
                    .real() *
           da;
    s.values.push_back(p);
  }
  return s;
}

Spectrum transmission(const Spectrum& sample, const Spectrum& reference) {
  if (sample.wavelengths.size() != reference.wavelengths.size())
    throw ConfigError("transmission: wavelength lists differ in length");
  Spectrum t;
  t.wavelengths = sample.wavelengths;
  for (std::size_t i = 0; i < sample.wavelengths.size(); ++i) {
    if (std::abs(sample.wavelengths[i] - reference.wavelengths[i]) >
        1e-12 * reference.wavelengths[i])
      throw ConfigError("transmission: wavelength lists do not match");
    if (!(reference.values[i] > 0))
      throw NumericalError("transmission: reference flux is not positive at " +
                           std::to_string(reference.wavelengths[i] * 1e9) + " nm");
    t.values.push_back(sample.values[i] / reference.values[i]);
  }
  return t;
}

PointProbe::PointProbe(const GridSpec& spec, std::size_t ci, std::size_t cj,
                       std::size_t ck, std::size_t stride)
    : ci_(ci), cj_(cj), ck_(ck), stride_(stride == 0 ? 1 : stride) {
  if (ci >= spec.nx || cj >= spec.ny || ck >= spec.nz)
    throw ConfigError("point probe outside the grid");
}

void PointProbe::maybe_record(const YeeGrid& g) {
  if (g.time_index % stride_ != 0) return;
  const auto e = colocated_e(g, ci_, cj_, ck_);
  t_.push_back(double(g.time_index) * g.dt);
  ex_.push_back(e[0]);
  ey_.push_back(e[1]);
  ez_.push_back(e[2]);
}

} // namespace nfbc
