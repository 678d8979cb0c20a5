#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ptone/geometry.hpp"
#include "ptone/grid.hpp"
#include "ptone/solver.hpp"

namespace ptone {

// Radial vector field X = a(r) grad r, carried either by closed-form
// callables or by piecewise-linear samples (knots strictly increasing,
// constant-extended outside their span).
class RadialField {
 public:
  static RadialField from_function(std::string tag,
                                   std::function<double(double)> component,
                                   std::function<double(double)> derivative =
                                       nullptr,
                                   std::vector<double> breakpoints = {});
  static RadialField constant(double beta);
  static RadialField gradient_distance();  // a == 1, the field grad rho
  static RadialField piecewise_linear(std::vector<double> knots,
                                      std::vector<double> values,
                                      std::string tag = "piecewise_linear");

  double component(double r) const;  // a(r)
  double norm(double r) const;       // |a(r)|
  // a'(r): closed form when supplied, interval slope for piecewise-linear
  // carriers, central finite difference otherwise.
  double derivative(double r) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& tag() const { return tag_; }
  bool is_piecewise_linear() const { return piecewise_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& knot_values() const { return knot_values_; }

 private:
  RadialField() = default;
  int interval(double r) const;

  std::string tag_;
  bool piecewise_ = false;
  std::function<double(double)> a_, da_;
  std::vector<double> knots_, knot_values_;
  std::vector<double> breakpoints_;
};

// div(a grad r) = a'(r) + a(r) (n-1) f'/f. Throws std::domain_error at a
// listed breakpoint (sample around it) and outside the validity range.
double field_divergence(const WarpedModel& model, const RadialField& field,
                        double r);

enum class BoundMethod {
  c_constant,           // (inf div / sup |a|)^p / p^p, needs inf div > 0
  thm2_field,           // inf of (1-p)|a|^q + div a
  mckean,               // ((n-1) c / p)^p under K <= -c^2
  ball_comparison,      // ((1 + (n-1) inf r f'/f) / (p R))^p on balls
  eigenfield_sharpness  // thm2 functional of the eigenfunction field
};

std::string to_string(BoundMethod method);

struct BoundReport {
  BoundMethod method = BoundMethod::thm2_field;
  double value = 0.0;
  bool valid = true;      // preconditions held on the sampled domain
  bool certified = true;  // value is a rigorous lower bound when valid
  std::string field_tag;
  std::string note;
  double inf_divergence = 0.0;   // c_constant diagnostics
  double sup_norm = 0.0;
  double inf_location = 0.0;     // argmin of the decisive infimum
  double functional_min = 0.0;   // thm2 / sharpness profile range
  double functional_max = 0.0;
  int samples = 0;
};

// Divergence-to-norm constant bound: with A = inf div X > 0 and
// s = sup |X|, the tone is at least (A/s)^p / p^p. Infima and suprema come
// from dense sampling of the closed domain (default 20480 points) plus a
// near-pole probe on balls. Failure of A > 0 flags the report invalid
// instead of throwing.
BoundReport c_constant_bound(const WarpedModel& model,
                             const RadialDomain& domain,
                             const SpectralParams& params,
                             const RadialField& field, int samples = 20480);

// Lower bound by the pointwise functional (1-p)|X|^q + div X; its infimum
// over the domain bounds the tone from below for any W^{1,1} field.
BoundReport thm2_bound(const WarpedModel& model, const RadialDomain& domain,
                       const SpectralParams& params, const RadialField& field,
                       int samples = 20480);

// psi(eps) = eps^p (A - B eps^q) on eps >= 0, the payoff of the epsilon
// Young inequality in the divergence-method proof.
struct YoungParams {
  double A = 0.0;  // must be >= 0
  double B = 0.0;  // must be > 0
  double p = 2.0;
  double q = 2.0;  // conjugate of p
};

struct YoungMax {
  double eps_star = 0.0;
  double psi_max = 0.0;
};

double young_psi(const YoungParams& params, double eps);

// Closed-form maximizer: eps* = (pA / ((p+q)B))^{1/q},
// psi_max = q p^{p/q} A^p / ((p+q)^p B^{p/q}). A = 0 collapses to zero.
YoungMax young_psi_max(const YoungParams& params);

// The field q^{p-1} rho grad rho restricted to a ball, i.e. a(r) =
// q^{p-1} r. Its divergence is q^{p-1} (1 + rho Delta rho).
RadialField canonical_ball_field(const WarpedModel& model,
                                 const RadialDomain& domain,
                                 const SpectralParams& params);

// Ball bound ((1 + (n-1) inf_{(0,R]} r f'/f) / (p R))^p; the infimum is
// sampled densely with the analytic limit 1 at r -> 0 on space forms.
// Euclidean balls reduce to (n / (p R))^p.
BoundReport ball_comparison_bound(const WarpedModel& model,
                                  const RadialDomain& domain,
                                  const SpectralParams& params,
                                  int samples = 20480);

// ((n-1) c / p)^p, the constant-curvature floor under K <= -c^2.
double mckean_bound(int dim, double c, const SpectralParams& params);

// McKean floor for a model: space forms use k directly (k < 0 required);
// custom warps take c^2 = -(sup sampled radial curvature) when negative.
BoundReport mckean_bound_for(const WarpedModel& model,
                             const SpectralParams& params,
                             int samples = 4096);

// Discrete sharpness field a = -|u'|^{p-2}u' / (|u|^{p-2}u) sampled at
// interior interfaces (differences for u', adjacent-cell averages for u),
// restricted to interfaces where |u| >= 5% of max |u| (the functional
// below loses its cancellation where u degenerates toward the boundary).
// Throws std::domain_error when u changes sign.
RadialField eigenfunction_field(const RadialFunction& u,
                                const SpectralParams& params);

// Thm2 functional of the eigenfunction field evaluated at its native
// samples (central differences for a'). The result estimates the tone, is
// near-constant across the samples, and is reported as an estimate, not a
// certified bound.
BoundReport eigenfield_sharpness(const WarpedModel& model,
                                 const SpectralParams& params,
                                 const RadialFunction& u);

struct FieldFamilyOptions {
  int control_points = 16;    // <= 64
  double value_clamp = 1e6;
  int budget = 2000;          // objective evaluations for the search
  int search_samples = 2048;  // sampling during the search
  int report_samples = 20480; // sampling for the returned report
};

// Maximizes the chosen bound over piecewise-linear fields on uniform
// control points by derivative-free coordinate ascent. Seeds: zero field,
// gradient_distance, canonical ball field (ball domains), the optimal
// constant field (golden section over beta), and the projected
// eigenfunction field when given. When reference_tone is supplied the
// result is asserted against it (std::logic_error past 1e-6 slack).
BoundReport optimize_field_family(
    const WarpedModel& model, const RadialDomain& domain,
    const SpectralParams& params, BoundMethod method,
    const FieldFamilyOptions& options = {},
    const RadialFunction* eigenfunction = nullptr,
    std::optional<double> reference_tone = std::nullopt);

}  // namespace ptone
