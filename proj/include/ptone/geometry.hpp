#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ptone {

inline constexpr double pi = 3.14159265358979323846;

// Area of the unit (n-1)-sphere bounding the unit ball in R^n.
double unit_sphere_area(int dim);

// Geodesic ball about the pole or an annulus between two radii, on the
// radial chart of a rotationally symmetric model.
struct RadialDomain {
  enum class Kind { ball, annulus };

  Kind kind = Kind::ball;
  double r0 = 0.0;  // inner radius (0 for balls)
  double r1 = 0.0;  // outer radius

  static RadialDomain ball(double radius);
  static RadialDomain annulus(double inner, double outer);

  double inner() const { return r0; }
  double outer() const { return r1; }
  std::string describe() const;
};

// Monotone cubic Hermite interpolant (Fritsch-Carlson limited slopes).
// Preserves monotonicity of the data on each interval; C^1 overall.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  explicit MonotoneCubic(std::vector<std::pair<double, double>> samples);

  double operator()(double x) const;
  double derivative(double x) const;
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

 private:
  int interval(double x) const;
  std::vector<double> x_, y_, m_;  // nodes, values, node slopes
};

// Rotationally symmetric model manifold: metric dr^2 + f(r)^2 dtheta^2 on
// (0, r_max) x S^{n-1}, with f > 0 in the interior. Space forms carry the
// constant-curvature warp (sin, linear, sinh family); custom models carry
// user functions or a monotone-cubic table.
class WarpedModel {
 public:
  static WarpedModel space_form(int dim, double curvature);
  static WarpedModel space_form(int dim, double curvature, double r_max);

  // f and f_prime evaluated on (r_min, r_max). f_second optional; when
  // absent radial_curvature falls back to finite differences.
  static WarpedModel custom(int dim, std::function<double(double)> f,
                            std::function<double(double)> f_prime,
                            double r_max,
                            std::function<double(double)> f_second = nullptr,
                            bool pole = true);

  // Two-column (r, f(r)) table, r strictly increasing, at least 3 rows.
  // Valid range is the table span; pole iff the table starts at (0, 0).
  static WarpedModel from_table(int dim,
                                std::vector<std::pair<double, double>> rows);

  int dim() const { return dim_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  bool is_space_form() const { return space_form_; }
  double curvature() const;  // space forms only
  bool has_pole() const { return pole_; }
  double omega() const { return omega_; }  // unit_sphere_area(dim)

  double warp(double r) const;
  double warp_prime(double r) const;
  bool has_warp_second() const;
  double warp_second(double r) const;

  // Upper end of validity for f'/f evaluations. Positive curvature caps it
  // at pi/(2 sqrt k); otherwise r_max.
  double ratio_limit() const;

  // Throws std::invalid_argument when the domain does not fit the model.
  void check_domain(const RadialDomain& domain) const;

 private:
  WarpedModel() = default;

  int dim_ = 0;
  double omega_ = 0.0;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  bool space_form_ = false;
  bool pole_ = true;
  double k_ = 0.0;  // space-form curvature
  std::function<double(double)> f_, fp_, fpp_;
};

// f'(r)/f(r). Closed form on space forms:
//   k < 0: c coth(c r), c = sqrt(-k)     (decreasing, bounded below by c)
//   k = 0: 1/r
//   k > 0: s cot(s r), s = sqrt(k), only for r < pi/(2 s)  (hard failure past)
double warp_ratio(const WarpedModel& model, double r);

// Laplacian of the distance function: (n-1) f'/f.
double distance_laplacian(const WarpedModel& model, double r);

// Radial sectional curvature -f''/f. Exactly k on space forms.
double radial_curvature(const WarpedModel& model, double r);

// Area of the geodesic sphere of radius r: omega_{n-1} f(r)^{n-1}.
double sphere_area(const WarpedModel& model, double r);
double log_sphere_area(const WarpedModel& model, double r);

// Volume of the geodesic ball: integral of sphere_area from 0 to r.
// Space forms with dim 2..4 use the closed antiderivative; anything else
// uses adaptive Simpson quadrature at 1e-10 relative tolerance.
double ball_volume(const WarpedModel& model, double r);

// log of ball_volume evaluated without overflow (log-sum over a composite
// Simpson rule). Safe for volumes far beyond double range.
double log_ball_volume(const WarpedModel& model, double r);

// Adaptive Simpson quadrature; throws std::runtime_error when the
// tolerance cannot be met. Shared by geometry and the test oracles.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol);

}  // namespace ptone
