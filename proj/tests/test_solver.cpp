#include "ptone/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "ptone/geometry.hpp"
#include "ptone/grid.hpp"

using namespace ptone;

TEST_CASE("spectral params") {
  SpectralParams p2(2.0);
  CHECK(p2.q == doctest::Approx(2.0).epsilon(1e-15));
  SpectralParams p3(3.0);
  CHECK(p3.q == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(SpectralParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(0.5), std::invalid_argument);
}

TEST_CASE("energy, mass, quotient on the two-cell interval") {
  RadialGrid g = flat_interval_grid(0.0, 1.0, 2);
  RadialFunction u(g);
  u.values = {1.0, 1.0};
  SpectralParams p2(2.0);
  // Ghost values 0 at one spacing beyond each Dirichlet end: differences
  // are (1-0)/h, 0, (0-1)/h with h = 1/2.
  CHECK(p_energy(u, p2) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(p_mass(u, p2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rayleigh_quotient(u, p2) == doctest::Approx(4.0).epsilon(1e-15));

  // p-homogeneity of energy and scale invariance of the quotient.
  RadialFunction v(g);
  v.values = {3.0, 3.0};
  SpectralParams p3(3.0);
  CHECK(p_energy(v, p3) ==
        doctest::Approx(27.0 * p_energy(u, p3)).epsilon(1e-13));
  CHECK(rayleigh_quotient(v, p3) ==
        doctest::Approx(rayleigh_quotient(u, p3)).epsilon(1e-13));

  RadialFunction z(g);
  CHECK_THROWS_AS(rayleigh_quotient(z, p2), std::domain_error);
}

TEST_CASE("p=2 interval eigenvalues are exact discrete values") {
  SpectralParams p2(2.0);
  // Discrete minimum with ghost ends: 4 N^2 sin^2(pi / (2(N+1))).
  {
    RadialGrid g = flat_interval_grid(0.0, 1.0, 2);
    ToneResult r = solve_first_tone(g, p2, {});
    CHECK(r.estimate.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.estimate.kind == ToneKind::converged_eigenvalue);
  }
  {
    RadialGrid g = flat_interval_grid(0.0, 1.0, 3);
    ToneResult r = solve_first_tone(g, p2, {});
    CHECK(r.estimate.value ==
          doctest::Approx(5.272077938642145).epsilon(1e-12));
  }
  {
    RadialGrid g = flat_interval_grid(0.0, 1.0, 256);
    ToneResult r = solve_first_tone(g, p2, {});
    CHECK(r.estimate.value ==
          doctest::Approx(9.792825624814522).epsilon(1e-10));
    // Residual certifies the eigen-equation, not just quotient stagnation.
    CHECK(r.estimate.residual <= 1e-6 * r.estimate.value);
  }
}

TEST_CASE("solver matches brute-force minimization at tiny sizes") {
  for (double p : {1.6, 2.0, 3.0}) {
    SpectralParams sp(p);
    RadialGrid g = flat_interval_grid(0.0, 1.0, 4);
    ToneResult solved = solve_first_tone(g, sp, {});
    double brute = brute_force_tone(g, sp);
    CHECK(solved.estimate.value ==
          doctest::Approx(brute).epsilon(1e-6));
  }
}

TEST_CASE("p=3 interval approaches the closed-form tone") {
  SpectralParams p3(3.0);
  RadialGrid g = flat_interval_grid(0.0, 1.0, 2048);
  ToneResult r = solve_first_tone(g, p3, {});
  // (p-1) (2 pi / (p sin(pi/p)))^p; the boundary error is first order in the
  // spacing, so N=2048 lands well inside half a percent.
  CHECK(r.estimate.value == doctest::Approx(28.28876197600255).epsilon(5e-3));
}

TEST_CASE("eigenfunction is positive and grid-bound") {
  auto e3 = WarpedModel::space_form(3, 0.0);
  RadialGrid g = build_grid(e3, RadialDomain::ball(1.0), 64);
  ToneResult r = solve_first_tone(g, SpectralParams(2.0), {});
  REQUIRE(r.eigenfunction.grid != nullptr);
  REQUIRE(r.eigenfunction.values.size() == 64);
  for (double v : r.eigenfunction.values) CHECK(v > 0.0);
  // Unit p-mass normalization.
  CHECK(p_mass(r.eigenfunction, SpectralParams(2.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tone decreases when the ball grows") {
  auto h3 = WarpedModel::space_form(3, -1.0);
  SpectralParams p2(2.0);
  double t1 = solve_first_tone(h3, RadialDomain::ball(1.0), p2, 256).estimate.value;
  double t2 = solve_first_tone(h3, RadialDomain::ball(2.0), p2, 256).estimate.value;
  double t3 = solve_first_tone(h3, RadialDomain::ball(3.0), p2, 256).estimate.value;
  CHECK(t1 > t2);
  CHECK(t2 > t3);
  CHECK(t3 > 1.0);  // never below the curvature floor (n-1)^2/4 = 1
}

TEST_CASE("annulus solve carries both boundaries") {
  auto h2 = WarpedModel::space_form(2, -1.0);
  RadialGrid g = build_grid(h2, RadialDomain::annulus(1.0, 4.0), 128);
  ToneResult r = solve_first_tone(g, SpectralParams(2.0), {});
  CHECK(r.estimate.value > 0.25);  // bounded below by the open-manifold tone
  CHECK(r.estimate.kind == ToneKind::converged_eigenvalue);
}

TEST_CASE("limit extrapolation recovers shifted inverse-square decay") {
  // Exact model lambda(R) = A + B / (R + s)^2 must be reproduced.
  double A = 0.25, B = 9.8696, s = -1.0;
  std::vector<double> radii = {5.0, 10.0, 20.0};
  std::vector<double> vals;
  for (double R : radii) vals.push_back(A + B / ((R + s) * (R + s)));
  LimitFit fit = extrapolate_tone_limit(radii, vals);
  CHECK(fit.limit == doctest::Approx(A).epsilon(1e-10));
  CHECK(fit.method == "shifted_inverse_square");

  // Two points fall back to the unshifted fit.
  LimitFit two = extrapolate_tone_limit({5.0, 10.0}, {A + B / 25.0, A + B / 100.0});
  CHECK(two.method == "inverse_square");
  CHECK(two.limit == doctest::Approx(A).epsilon(1e-10));

  // Constant input is an exact B=0 fit.
  LimitFit flat = extrapolate_tone_limit({1.0, 2.0, 3.0}, {0.5, 0.5, 0.5});
  CHECK(flat.method == "inverse_square");
  CHECK(flat.limit == doctest::Approx(0.5).epsilon(1e-14));

  // Increasing input has no sane decay fit and degrades to the last value.
  LimitFit rise = extrapolate_tone_limit({1.0, 2.0, 3.0}, {0.2, 0.3, 0.4});
  CHECK(rise.method == "last_value");
  CHECK(rise.limit == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("open-manifold exhaustion") {
  auto e2 = WarpedModel::space_form(2, 0.0);
  SpectralParams p2(2.0);
  ToneSequence seq =
      tone_of_open_manifold(e2, p2, {4.0, 8.0, 16.0}, 256);
  CHECK(seq.monotone);
  CHECK(seq.extrapolated >= 0.0);
  CHECK(seq.extrapolated < seq.last);
  CHECK(seq.tones.size() == 3);

  CHECK_THROWS_AS(tone_of_open_manifold(e2, p2, {4.0, 3.0}, 64),
                  std::invalid_argument);
}

TEST_CASE("tone kind labels") {
  CHECK(to_string(ToneKind::converged_eigenvalue) == "converged-eigenvalue");
  CHECK(to_string(ToneKind::variational_upper) == "variational-upper-bound");
  CHECK(to_string(ToneKind::rigorous_lower) == "rigorous-lower-bound");
}
