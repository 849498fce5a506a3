#include <cmath>
#include <vector>

#include "doctest.h"
#include "nfbc/constants.hpp"
#include "nfbc/errors.hpp"
#include "nfbc/oracle.hpp"

using namespace nfbc;

TEST_CASE("quasi-static internal field ratio") {
  CHECK(quasi_static_ratio(2.417) == doctest::Approx(0.3825608855213).epsilon(1e-11));
  CHECK(quasi_static_ratio(1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(quasi_static_ratio(0.0), ConfigError);
}

TEST_CASE("Mie interior center field matches reference values") {
  const double m = 2.417;
  // 25 nm diameter sphere at 532 nm
  const double x25 = pi * 25.0 / 532.0;
  const MieResult r1 = mie_internal_ratio(x25, m);
  CHECK(r1.ratio == doctest::Approx(0.3907996746).epsilon(1e-8));
  CHECK(r1.terms_used >= 2);
  CHECK(r1.terms_used <= 10);
  CHECK(r1.truncation_estimate < 1e-12);

  CHECK(mie_internal_ratio(0.075, m).ratio == doctest::Approx(0.3846712804).epsilon(1e-8));
  CHECK(mie_internal_ratio(0.0375, m).ratio == doctest::Approx(0.3830874472).epsilon(1e-8));

  // dynamic correction over the electrostatic value at the 25 nm size
  const double qs = quasi_static_ratio(m);
  CHECK(r1.ratio / qs - 1.0 == doctest::Approx(0.021536).epsilon(1e-3));
  // converges to the quasi-static limit as the sphere shrinks
  const double e_big = std::abs(mie_internal_ratio(0.075, m).ratio - qs);
  const double e_small = std::abs(mie_internal_ratio(0.0375, m).ratio - qs);
  CHECK(e_small < e_big);
  CHECK(e_small / qs < 4e-3);

  CHECK_THROWS_AS(mie_internal_ratio(-1.0, m), ConfigError);
  CHECK_THROWS_AS(mie_internal_ratio(0.1, 0.0), ConfigError);
}

TEST_CASE("transfer matrix reproduces closed forms") {
  // bare interface
  TmmStack bare;
  bare.n_in = 1.0;
  bare.n_out = 1.5;
  const double t_fresnel = 4.0 * 1.0 * 1.5 / ((1.0 + 1.5) * (1.0 + 1.5));
  CHECK(tmm_transmission(bare, {532e-9})[0] == doctest::Approx(t_fresnel).epsilon(1e-12));

  // a half-wave layer is absentee at its design wavelength
  TmmStack half = bare;
  half.layers.push_back({2.0, 532e-9 / (2.0 * 2.0)});
  CHECK(tmm_transmission(half, {532e-9})[0] == doctest::Approx(t_fresnel).epsilon(1e-10));

  // quarter-wave Bragg mirror: T = 4 n_in Y / (n_in + Y)^2, Y = n_out (nH/nL)^(2N)
  const double nh = 2.32, nl = 1.38, lam0 = 532e-9;
  const int pairs = 5;
  TmmStack bragg;
  bragg.n_in = 1.0;
  bragg.n_out = 1.52;
  for (int i = 0; i < pairs; ++i) {
    bragg.layers.push_back({nh, lam0 / (4.0 * nh)});
    bragg.layers.push_back({nl, lam0 / (4.0 * nl)});
  }
  const double y = bragg.n_out * std::pow(nh / nl, 2.0 * pairs);
  const double t_qw = 4.0 * bragg.n_in * y / ((bragg.n_in + y) * (bragg.n_in + y));
  CHECK(tmm_transmission(bragg, {lam0})[0] == doctest::Approx(t_qw).epsilon(1e-10));

  // lossless stacks conserve energy off resonance too
  std::vector<double> lams;
  for (int i = 0; i < 40; ++i) lams.push_back(400e-9 + i * 10e-9);
  const auto t = tmm_transmission(bragg, lams);
  const auto r = tmm_reflection(bragg, lams);
  for (std::size_t i = 0; i < lams.size(); ++i)
    CHECK(t[i] + r[i] == doctest::Approx(1.0).epsilon(1e-12));
  // stopband center is dark, far wings are bright
  CHECK(t[13] < 0.05);                        // 530 nm
  CHECK(tmm_transmission(bragg, {800e-9})[0] > 0.5);

  TmmStack bad = bare;
  bad.layers.push_back({-1.0, 10e-9});
  CHECK_THROWS_AS(tmm_transmission(bad, {532e-9}), ConfigError);
  CHECK_THROWS_AS(tmm_transmission(bare, {0.0}), ConfigError);
}

TEST_CASE("half-wave defect opens a resonance inside the stopband") {
  const double nh = 2.32, nl = 1.38, lam0 = 532e-9;
  const int pairs = 6;
  TmmStack cavity; // mirror, half-wave spacer, mirrored mirror
  for (int i = 0; i < pairs; ++i) {
    cavity.layers.push_back({nh, lam0 / (4.0 * nh)});
    cavity.layers.push_back({nl, lam0 / (4.0 * nl)});
  }
  cavity.layers.push_back({nl, lam0 / (2.0 * nl)});
  for (int i = 0; i < pairs; ++i) {
    cavity.layers.push_back({nl, lam0 / (4.0 * nl)});
    cavity.layers.push_back({nh, lam0 / (4.0 * nh)});
  }
  // the palindromic lossless stack is fully transparent on resonance
  CHECK(tmm_transmission(cavity, {lam0})[0] == doctest::Approx(1.0).epsilon(1e-10));
  // and still dark a few nm away
  CHECK(tmm_transmission(cavity, {522e-9})[0] < 0.01);
  CHECK(tmm_transmission(cavity, {542e-9})[0] < 0.01);
}
