#pragma once

#include <string>
#include <vector>

#include "ptone/geometry.hpp"
#include "ptone/solver.hpp"

namespace ptone {

// Exponential volume growth: least-squares slope of log V(r) over a
// window. The slope converges to the growth rate much faster than the
// pointwise ratio log V(r) / r, which carries a log-prefactor bias.
struct GrowthEstimate {
  double theta = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double fit_residual = 0.0;  // RMS deviation of log V from the fit line
  int samples = 0;
  std::string method = "log_volume_slope";
};

GrowthEstimate theta_estimate(const WarpedModel& model, double r_lo,
                              double r_hi, int samples = 64);

// theta^p / p^p, the growth ceiling for the tone at infinity on
// infinite-volume models.
double brooks_bound(double theta, const SpectralParams& params);

// Classifies the model volume by probing the last decade of
// min(r_max, 1e4): infinite when every log-spaced step grows V by more
// than 1%. Truncated tables that are still growing at their edge read as
// infinite, which is the intended reading of a truncated chart.
bool volume_is_infinite(const WarpedModel& model);

// Isoperimetric ratio S(r)/V(r) over geodesic spheres. This restricts the
// competitor class to spheres; the value is used only where the tail
// ratio is observed to converge to the infimum.
struct CheegerEstimate {
  double h = 0.0;
  double argmin_r = 0.0;
  double tail_ratio = 0.0;  // S(r_hi) / V(r_hi)
  std::vector<double> profile_r;
  std::vector<double> profile_ratio;
};

CheegerEstimate radial_cheeger(const WarpedModel& model, double r_lo,
                               double r_hi, int samples = 64);

// Tone at infinity through exhaustion: solve on Annulus(r0, R) for an
// increasing list of R (balls when r0 = 0) and extrapolate. Carries the
// growth data needed to check the value against theta^p / p^p.
struct EssentialToneEstimate {
  double value = 0.0;
  double inner_radius = 0.0;
  std::vector<double> radii;
  std::vector<double> tones;
  double last = 0.0;
  LimitFit extrapolation;
  bool monotone = true;          // tones non-increasing in R
  double theta = 0.0;            // window [R_last/2, R_last]
  double brooks = 0.0;
  bool volume_infinite = false;
  bool brooks_applies = false;   // the ceiling requires infinite volume
  bool brooks_ok = true;         // value <= brooks (1 + 1e-2) when it applies
};

EssentialToneEstimate essential_tone(const WarpedModel& model,
                                     const SpectralParams& params, double r0,
                                     const std::vector<double>& radii,
                                     int cells_per_radius, double tol = 1e-10);

// Consistency of the growth-versus-spectrum estimates: h <= theta always;
// when the sphere ratio has converged to its infimum (tail within 1% of
// h), the tone must sit at theta^p / p^p (relative 5% for a ceiling above
// 1e-2, absolute 1e-2 below).
struct OrderingReport {
  double h = 0.0;
  double theta = 0.0;
  double tail_ratio = 0.0;
  double tone = 0.0;
  double brooks = 0.0;
  bool h_le_theta = false;
  bool equality_case = false;
  bool equality_ok = true;
  bool pass = false;
  std::string note;
};

OrderingReport verify_orderings(const GrowthEstimate& growth,
                                const CheegerEstimate& cheeger,
                                const EssentialToneEstimate& ess,
                                const SpectralParams& params);

}  // namespace ptone
