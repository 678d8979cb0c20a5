#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ptone/grid.hpp"

namespace ptone {

// Exponent pair for the p-Laplacian; q is the conjugate, 1/p + 1/q = 1.
struct SpectralParams {
  double p;
  double q;
  explicit SpectralParams(double p_exponent);
};

enum class ToneKind {
  variational_upper,     // quotient of some admissible function
  converged_eigenvalue,  // quotient + residual gates both passed
  rigorous_lower,        // certified lower bound (field methods)
};

std::string to_string(ToneKind kind);

struct ToneEstimate {
  double value = 0.0;
  ToneKind kind = ToneKind::variational_upper;
  double p = 2.0;
  std::string domain;
  int cells = 0;
  int iterations = 0;
  double residual = 0.0;
};

// Discrete p-energy: sum over interfaces of S |Du|^p h, Dirichlet ghosts 0,
// no flux contribution at a pole end.
double p_energy(const RadialFunction& u, const SpectralParams& params);

// Discrete p-mass: sum over cells of S |u|^p h.
double p_mass(const RadialFunction& u, const SpectralParams& params);

// p_energy / p_mass. Throws std::domain_error for identically zero u.
double rayleigh_quotient(const RadialFunction& u, const SpectralParams& params);

// Strong-form eigenpair defect, weighted max over cells:
//   max_i | flux difference - lambda S_i h |u_i|^{p-2}u_i | / (S_i h).
double eigen_residual(const RadialFunction& u, double lambda,
                      const SpectralParams& params);

struct SolveOptions {
  double tol = 1e-10;         // relative quotient-change gate
  int max_outer = 500;
  double residual_tol = 1e-7;  // relative residual gate
  double inner_tol = 1e-12;    // inner cell-defect gate (relative)
};

struct ToneResult {
  ToneEstimate estimate;
  std::shared_ptr<const RadialGrid> grid;  // keeps the eigenfunction valid
  RadialFunction eigenfunction;            // unit p-mass, positive
};

// First Dirichlet tone of the discretized domain by inverse-power-type
// iteration: each outer step minimizes the strictly convex functional
//   (1/p) E_p(v) - sum_i S_i |u_k|^{p-2} u_k v_i h
// exactly, by integrating the interface fluxes the minimizer must carry
// (plus a scalar root-find for the inner-boundary flux on annuli), then
// renormalizes to unit p-mass. Converged when the quotient change and the
// strong-form residual both pass their gates.
ToneResult solve_first_tone(const RadialGrid& grid,
                            const SpectralParams& params,
                            const SolveOptions& options = {});
ToneResult solve_first_tone(const WarpedModel& model,
                            const RadialDomain& domain,
                            const SpectralParams& params, int cells,
                            double tol = 1e-10);

// Direct minimization of the discrete quotient over the sign-normalized
// unit sphere of cell values: random multistart plus coordinate pattern
// search. Only sensible for very small grids; enforced cells <= 6.
double brute_force_tone(const RadialGrid& grid, const SpectralParams& params,
                        int samples = 2000, unsigned seed = 0x5eed5u);
double brute_force_tone(const WarpedModel& model, const RadialDomain& domain,
                        const SpectralParams& params, int cells,
                        int samples = 2000);

// Limit extrapolation for a tone sequence along increasing radii.
// Fits value = A + B/(R+sigma)^2 through the last three points (bisection
// on sigma); falls back to the two-point 1/R^2 fit, then to the last value.
struct LimitFit {
  double limit = 0.0;
  std::string method;  // shifted_inverse_square | inverse_square | last_value
};
LimitFit extrapolate_tone_limit(const std::vector<double>& radii,
                                const std::vector<double>& values);

// Exhaustion of an open model by balls. Tones are non-increasing in R
// (monotone flag records violations beyond 1e-9 relative slack); the last
// entry is the open-manifold estimate and `extrapolated` refines it.
struct ToneSequence {
  std::vector<double> radii;
  std::vector<ToneEstimate> tones;
  double last = 0.0;
  double extrapolated = 0.0;
  std::string extrapolation;
  bool monotone = true;
};
ToneSequence tone_of_open_manifold(const WarpedModel& model,
                                   const SpectralParams& params,
                                   const std::vector<double>& radii,
                                   int cells_per_radius, double tol = 1e-10);

}  // namespace ptone
