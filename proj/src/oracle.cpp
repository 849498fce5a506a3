#include "nfbc/oracle.hpp"

#include <cmath>
#include <complex>

#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"

namespace nfbc {

namespace {

using cd = std::complex<double>;

// Riccati-Bessel psi_n(x) = x j_n(x) and xi_n(x) = x (j_n(x) + i y_n(x)),
// with derivatives via the downward recurrence f_n' = f_{n-1} - (n/x) f_n
// applied to the Riccati forms: psi_n'(x) = x j_{n-1}(x) - n j_n(x).
double psi(unsigned n, double x) { return x * std::sph_bessel(n, x); }
double psi_d(unsigned n, double x) {
  return x * std::sph_bessel(n - 1, x) - double(n) * std::sph_bessel(n, x);
}
cd xi(unsigned n, double x) {
  return x * cd(std::sph_bessel(n, x), std::sph_neumann(n, x));
}
cd xi_d(unsigned n, double x) {
  return x * cd(std::sph_bessel(n - 1, x), std::sph_neumann(n - 1, x)) -
         double(n) * cd(std::sph_bessel(n, x), std::sph_neumann(n, x));
}

cd d_coeff(unsigned n, double x, double m) {
  const double mx = m * x;
  const cd denom = m * psi(n, mx) * xi_d(n, x) - xi(n, x) * psi_d(n, mx);
  return cd(0.0, m) / denom;
}

} // namespace

double quasi_static_ratio(double n_sphere) {
  if (!(n_sphere > 0)) throw ConfigError("sphere index must be positive");
  return 3.0 / (n_sphere * n_sphere + 2.0);
}

MieResult mie_internal_ratio(double size_parameter, double m_relative) {
  if (!(size_parameter > 0)) throw ConfigError("size parameter must be positive");
  if (!(m_relative > 0)) throw ConfigError("relative index must be positive");

  const double x = size_parameter, m = m_relative;
  MieResult out;
  out.ratio = std::abs(d_coeff(1, x, m));

  // Relative weight of partial wave n in |E| evaluated just off center
  // (r = 1e-5 a): the interior radial functions scale as (m k r)^(n-1).
  const double rho = m * x * 1e-5;
  const double s1 = out.ratio * 1.5;
  double tail = 0;
  std::size_t n = 1;
  for (n = 2; n <= 200; ++n) {
    const double dn = std::abs(d_coeff(unsigned(n), x, m));
    const double sn = dn * (2.0 * double(n) + 1.0) / (double(n) * (double(n) + 1.0)) *
                      std::pow(rho, double(n) - 1.0);
    tail = sn / s1;
    if (tail < 1e-12) break;
  }
  if (n > 200)
    throw NumericalError("Mie interior series failed to converge in 200 terms");
  out.terms_used = n;
  out.truncation_estimate = tail;
  return out;
}

namespace {

void tmm_amplitudes(const TmmStack& st, double lambda, cd& b, cd& c) {
  if (!(lambda > 0)) throw ConfigError("TMM wavelength must be positive");
  if (!(st.n_in > 0) || !(st.n_out > 0))
    throw ConfigError("TMM ambient indices must be positive");
  cd m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  for (const TmmLayer& L : st.layers) {
    if (!(L.n > 0) || L.thickness < 0)
      throw ConfigError("TMM layers need positive index and non-negative thickness");
    const double delta = 2.0 * pi * L.n * L.thickness / lambda;
    const cd a00 = std::cos(delta), a01 = cd(0, std::sin(delta) / L.n);
    const cd a10 = cd(0, L.n * std::sin(delta)), a11 = a00;
    const cd t00 = m00 * a00 + m01 * a10, t01 = m00 * a01 + m01 * a11;
    const cd t10 = m10 * a00 + m11 * a10, t11 = m10 * a01 + m11 * a11;
    m00 = t00; m01 = t01; m10 = t10; m11 = t11;
  }
  b = m00 + m01 * st.n_out;
  c = m10 + m11 * st.n_out;
}

} // namespace

std::vector<double> tmm_transmission(const TmmStack& stack,
                                     const std::vector<double>& wavelengths) {
  std::vector<double> out;
  out.reserve(wavelengths.size());
  for (double lam : wavelengths) {
    cd b, c;
    tmm_amplitudes(stack, lam, b, c);
    const cd t = 2.0 * stack.n_in / (stack.n_in * b + c);
    out.push_back(stack.n_out / stack.n_in * std::norm(t));
  }
  return out;
}

std::vector<double> tmm_reflection(const TmmStack& stack,
                                   const std::vector<double>& wavelengths) {
  std::vector<double> out;
  out.reserve(wavelengths.size());
  for (double lam : wavelengths) {
    cd b, c;
    tmm_amplitudes(stack, lam, b, c);
    const cd r = (stack.n_in * b - c) / (stack.n_in * b + c);
    out.push_back(std::norm(r));
  }
  return out;
}

} // namespace nfbc
