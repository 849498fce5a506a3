#pragma once

namespace nfbc {

// CODATA 2018 exact values (SI).
inline constexpr double c0 = 299792458.0;            // speed of light, m/s
inline constexpr double mu0 = 1.25663706212e-6;      // vacuum permeability, H/m
inline constexpr double eps0 = 8.8541878128e-12;     // vacuum permittivity, F/m
inline constexpr double eta0 = 376.730313668;        // vacuum impedance, ohm
inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace nfbc
