#include "ptone/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ptone {

namespace {

// |x|^{p-2} x with the removable zero at x = 0.
inline double phi(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x;
  return std::copysign(std::pow(std::abs(x), p - 1.0), x);
}

// Inverse of phi: sign(y) |y|^{1/(p-1)}.
inline double phi_inv(double y, double p) {
  if (y == 0.0) return 0.0;
  if (p == 2.0) return y;
  return std::copysign(std::pow(std::abs(y), 1.0 / (p - 1.0)), y);
}

// Interface j carries a flux unless it is the no-flux pole end.
inline bool active_interface(const RadialGrid& g, int j) {
  return j != 0 || g.inner_dirichlet;
}

void interface_differences(const RadialGrid& g, const std::vector<double>& v,
                           std::vector<double>* du) {
  const int n = g.cells;
  du->resize(n + 1);
  const double inv_h = 1.0 / g.spacing;
  for (int j = 0; j <= n; ++j) {
    const double left = (j == 0) ? 0.0 : v[j - 1];
    const double right = (j == n) ? 0.0 : v[j];
    (*du)[j] = (right - left) * inv_h;
  }
  if (!g.inner_dirichlet) (*du)[0] = 0.0;
}

}  // namespace

SpectralParams::SpectralParams(double p_exponent) : p(p_exponent), q(0.0) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument(
        "SpectralParams: exponent must be finite and exceed 1, got " +
        std::to_string(p_exponent));
  q = p / (p - 1.0);
}

std::string to_string(ToneKind kind) {
  switch (kind) {
    case ToneKind::variational_upper: return "variational-upper-bound";
    case ToneKind::converged_eigenvalue: return "converged-eigenvalue";
    case ToneKind::rigorous_lower: return "rigorous-lower-bound";
  }
  return "unknown";
}

double p_energy(const RadialFunction& u, const SpectralParams& params) {
  if (!u.grid) throw std::invalid_argument("p_energy: unbound function");
  const RadialGrid& g = *u.grid;
  const int n = g.cells;
  if (static_cast<int>(u.values.size()) != n)
    throw std::invalid_argument("p_energy: value count does not match grid");
  const double p = params.p;
  const double inv_h = 1.0 / g.spacing;
  double acc = 0.0;
  for (int j = 0; j <= n; ++j) {
    if (!active_interface(g, j)) continue;
    const double w = g.interface_weight[j];
    if (w == 0.0) continue;
    const double left = (j == 0) ? 0.0 : u.values[j - 1];
    const double right = (j == n) ? 0.0 : u.values[j];
    const double du = (right - left) * inv_h;
    acc += w * std::pow(std::abs(du), p);
  }
  return acc * g.spacing;
}

double p_mass(const RadialFunction& u, const SpectralParams& params) {
  if (!u.grid) throw std::invalid_argument("p_mass: unbound function");
  const RadialGrid& g = *u.grid;
  double acc = 0.0;
  for (int i = 0; i < g.cells; ++i)
    acc += g.center_weight[i] * std::pow(std::abs(u.values[i]), params.p);
  return acc * g.spacing;
}

double rayleigh_quotient(const RadialFunction& u,
                         const SpectralParams& params) {
  const double mass = p_mass(u, params);
  if (!(mass > 0.0))
    throw std::domain_error("rayleigh_quotient: function has zero p-mass");
  return p_energy(u, params) / mass;
}

double eigen_residual(const RadialFunction& u, double lambda,
                      const SpectralParams& params) {
  const RadialGrid& g = *u.grid;
  const int n = g.cells;
  const double p = params.p;
  const double h = g.spacing;
  std::vector<double> du;
  interface_differences(g, u.values, &du);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double flux_in = 0.0;
    if (active_interface(g, i))
      flux_in = g.interface_weight[i] * phi(du[i], p);
    const double flux_out = g.interface_weight[i + 1] * phi(du[i + 1], p);
    const double body = lambda * g.center_weight[i] * h * phi(u.values[i], p);
    const double defect = flux_in - flux_out - body;
    worst = std::max(worst, std::abs(defect) / (g.center_weight[i] * h));
  }
  return worst;
}

namespace {

// Exact inner solve by flux integration. The cell equations
//   W_i phi(Du_i) - W_{i+1} phi(Du_{i+1}) = rhs_i
// telescope, so every interface flux is F_j = F_0 - sum_{i<j} rhs_i. At a
// pole F_0 = 0 and the whole solve is forward substitution; on an annulus
// F_0 is the root of a strictly decreasing scalar defect, found by
// bisection. No regularization is needed at any p > 1.
bool flux_inner_solve(const RadialGrid& g, const std::vector<double>& rhs,
                      double p, const SolveOptions& opt,
                      std::vector<double>* v) {
  const int n = g.cells;
  const double h = g.spacing;
  double rhs_scale = 0.0;
  for (double b : rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
  if (rhs_scale == 0.0)
    throw std::runtime_error("solve_first_tone: zero right-hand side");
  const double gate = opt.inner_tol * rhs_scale;

  std::vector<double> prefix(n + 1, 0.0);  // prefix[j] = sum_{i<j} rhs_i
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + rhs[i];

  v->resize(n);
  // Integrates the profile inward from the outer Dirichlet end for interface
  // fluxes F_j = t - prefix[j]; cells 1..n-1 and the outer boundary are then
  // satisfied exactly. Returns the remaining cell-0 defect.
  auto rebuild = [&](double t) -> double {
    double dun = phi_inv((t - prefix[n]) / g.interface_weight[n], p);
    (*v)[n - 1] = -h * dun;
    for (int j = n - 1; j >= 1; --j) {
      const double duj = phi_inv((t - prefix[j]) / g.interface_weight[j], p);
      (*v)[j - 1] = (*v)[j] - h * duj;
    }
    if (!g.inner_dirichlet) return 0.0;
    const double f0 = g.interface_weight[0] * phi((*v)[0] / h, p);
    return f0 - t;
  };

  if (!g.inner_dirichlet) {
    rebuild(0.0);  // pole: interface 0 carries no flux
    return true;
  }

  // The defect is strictly decreasing in t and brackets zero on
  // [0, prefix[n]] whenever the right-hand side is nonnegative; expand the
  // bracket geometrically if an iterate ever escapes it.
  double lo = std::min(0.0, prefix[n]);
  double hi = std::max(0.0, prefix[n]);
  double d_lo = rebuild(lo);
  for (int grow = 0; d_lo < 0.0 && grow < 64; ++grow) {
    lo -= std::max(rhs_scale, hi - lo);
    d_lo = rebuild(lo);
  }
  double d_hi = rebuild(hi);
  for (int grow = 0; d_hi > 0.0 && grow < 64; ++grow) {
    hi += std::max(rhs_scale, hi - lo);
    d_hi = rebuild(hi);
  }
  if (d_lo < 0.0 || d_hi > 0.0) return false;

  double best_t = std::abs(d_lo) <= std::abs(d_hi) ? lo : hi;
  double best_d = std::min(std::abs(d_lo), std::abs(d_hi));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // interval is one ulp wide
    const double d_mid = rebuild(mid);
    if (std::abs(d_mid) < best_d) {
      best_d = std::abs(d_mid);
      best_t = mid;
    }
    if (d_mid <= gate && d_mid >= -gate) break;
    if (d_mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  best_d = std::abs(rebuild(best_t));
  return best_d <= std::max(gate, 1e-4 * rhs_scale);
}

void normalize_p_mass(const RadialGrid& g, double p, std::vector<double>* v) {
  double mass = 0.0;
  for (int i = 0; i < g.cells; ++i)
    mass += g.center_weight[i] * std::pow(std::abs((*v)[i]), p);
  mass *= g.spacing;
  if (!(mass > 0.0))
    throw std::runtime_error("solve_first_tone: iterate lost all mass");
  const double scale = std::pow(mass, -1.0 / p);
  for (double& x : *v) x *= scale;
}

std::vector<double> tent_profile(const RadialGrid& g) {
  std::vector<double> u(g.cells);
  for (int i = 0; i < g.cells; ++i) {
    const double r = g.centers[i];
    const double to_outer = g.hi - r;
    const double to_inner = g.inner_dirichlet
                                ? r - g.lo
                                : std::numeric_limits<double>::infinity();
    u[i] = std::min(to_inner, to_outer);
  }
  return u;
}

}  // namespace

ToneResult solve_first_tone(const RadialGrid& grid,
                            const SpectralParams& params,
                            const SolveOptions& options) {
  if (grid.cells < 2)
    throw std::invalid_argument("solve_first_tone: need at least 2 cells");
  const double p = params.p;

  RadialFunction u(grid);
  u.values = tent_profile(grid);
  normalize_p_mass(grid, p, &u.values);

  std::vector<double> rhs(grid.cells);

  double lambda = rayleigh_quotient(u, params);
  double best_lambda = lambda;
  std::vector<double> best_values = u.values;
  bool converged = false;
  int outer = 0;

  for (outer = 1; outer <= options.max_outer; ++outer) {
    for (int i = 0; i < grid.cells; ++i)
      rhs[i] = grid.center_weight[i] * phi(u.values[i], p) * grid.spacing;

    std::vector<double> v;
    if (!flux_inner_solve(grid, rhs, p, options, &v))
      throw std::runtime_error(
          "solve_first_tone: inner flux solve failed to reach tolerance");

    normalize_p_mass(grid, p, &v);
    RadialFunction candidate(grid);
    candidate.values = v;
    const double next = rayleigh_quotient(candidate, params);

    if (next > lambda * (1.0 + 1e-14) && outer > 1) {
      // The exact iteration never raises the quotient; an increase means
      // the iterate is rattling at roundoff level around the fixed point.
      break;
    }

    const double change = std::abs(next - lambda);
    u.values = v;
    lambda = next;
    if (lambda < best_lambda) {
      best_lambda = lambda;
      best_values = u.values;
    }
    if (change <= options.tol * std::max(std::abs(lambda), 1e-300)) {
      const double res = eigen_residual(u, lambda, params);
      if (res <= options.residual_tol * std::max(lambda, 1e-300)) {
        converged = true;
        break;
      }
    }
  }

  u.values = best_values;
  const double final_lambda = rayleigh_quotient(u, params);
  const double final_residual = eigen_residual(u, final_lambda, params);
  ToneResult out;
  out.grid = std::make_shared<RadialGrid>(grid);
  out.eigenfunction.grid = out.grid.get();
  out.eigenfunction.values = std::move(u.values);
  out.estimate.value = final_lambda;
  out.estimate.kind = converged ? ToneKind::converged_eigenvalue
                                : ToneKind::variational_upper;
  out.estimate.p = p;
  out.estimate.domain = grid.tag;
  out.estimate.cells = grid.cells;
  out.estimate.iterations = outer;
  out.estimate.residual = final_residual;
  return out;
}

ToneResult solve_first_tone(const WarpedModel& model,
                            const RadialDomain& domain,
                            const SpectralParams& params, int cells,
                            double tol) {
  const RadialGrid grid = build_grid(model, domain, cells);
  SolveOptions opt;
  opt.tol = tol;
  return solve_first_tone(grid, params, opt);
}

double brute_force_tone(const RadialGrid& grid, const SpectralParams& params,
                        int samples, unsigned seed) {
  const int n = grid.cells;
  if (n < 2 || n > 6)
    throw std::invalid_argument(
        "brute_force_tone: cell count must be between 2 and 6, got " +
        std::to_string(n));
  RadialFunction u(grid);

  auto quotient = [&](const std::vector<double>& v) -> double {
    u.values = v;
    const double mass = p_mass(u, params);
    if (!(mass > 1e-300)) return std::numeric_limits<double>::infinity();
    return p_energy(u, params) / mass;
  };

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> best = tent_profile(grid);
  double best_q = quotient(best);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> v(n);
    for (double& x : v) x = gauss(rng);
    const double q = quotient(v);
    if (q < best_q) {
      best_q = q;
      best = v;
    }
  }

  // Coordinate pattern search; the quotient is scale-invariant so the
  // iterate never needs explicit renormalization.
  double scale = 0.0;
  for (double x : best) scale = std::max(scale, std::abs(x));
  double step = 0.5 * scale;
  std::vector<double> probe = best;
  while (step > 1e-12 * scale) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double dir : {+1.0, -1.0}) {
        probe = best;
        probe[i] += dir * step;
        const double q = quotient(probe);
        if (q < best_q - 1e-16 * std::abs(best_q)) {
          best_q = q;
          best = probe;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_q;
}

double brute_force_tone(const WarpedModel& model, const RadialDomain& domain,
                        const SpectralParams& params, int cells, int samples) {
  const RadialGrid grid = build_grid(model, domain, cells);
  return brute_force_tone(grid, params, samples);
}

LimitFit extrapolate_tone_limit(const std::vector<double>& radii,
                                const std::vector<double>& values) {
  if (radii.size() != values.size() || radii.empty())
    throw std::invalid_argument("extrapolate_tone_limit: bad input sizes");
  const size_t k = radii.size();
  if (k == 1) return {values[0], "last_value"};

  auto two_point = [&](double r2, double v2, double r3, double v3) -> LimitFit {
    const double g2 = 1.0 / (r2 * r2), g3 = 1.0 / (r3 * r3);
    const double b = (v2 - v3) / (g2 - g3);
    double a = v3 - b * g3;
    if (!std::isfinite(a) || a < -1e-9 || a > v3 + 1e-12 * std::abs(v3))
      return {v3, "last_value"};
    return {std::max(a, 0.0), "inverse_square"};
  };

  const double r3 = radii[k - 1], v3 = values[k - 1];
  const double r2 = radii[k - 2], v2 = values[k - 2];
  if (k == 2) return two_point(r2, v2, r3, v3);

  const double r1 = radii[k - 3], v1 = values[k - 3];
  const double d12 = v1 - v2, d23 = v2 - v3;
  if (!(d23 > 0.0) || !(d12 > 0.0)) return two_point(r2, v2, r3, v3);
  const double target = d12 / d23;

  auto ratio = [&](double sigma) -> double {
    const double g1 = 1.0 / ((r1 + sigma) * (r1 + sigma));
    const double g2s = 1.0 / ((r2 + sigma) * (r2 + sigma));
    const double g3s = 1.0 / ((r3 + sigma) * (r3 + sigma));
    return (g1 - g2s) / (g2s - g3s);
  };

  // ratio(sigma) decreases from +inf (sigma -> -r1) to (r2-r1)/(r3-r2)
  // (sigma -> inf); bracket then bisect.
  const double floor_ratio = (r2 - r1) / (r3 - r2);
  if (target <= floor_ratio * (1.0 + 1e-9))
    return two_point(r2, v2, r3, v3);
  double lo = -r1 * (1.0 - 1e-9);
  double hi = r3;
  int guard = 0;
  while (ratio(hi) > target && guard++ < 60) hi *= 2.0;
  if (guard >= 60) return two_point(r2, v2, r3, v3);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  const double sigma = 0.5 * (lo + hi);
  const double g2s = 1.0 / ((r2 + sigma) * (r2 + sigma));
  const double g3s = 1.0 / ((r3 + sigma) * (r3 + sigma));
  const double b = d23 / (g2s - g3s);
  double a = v3 - b * g3s;
  if (!std::isfinite(a) || a < -1e-9 || a > v3 + 1e-12 * std::abs(v3))
    return two_point(r2, v2, r3, v3);
  return {std::max(a, 0.0), "shifted_inverse_square"};
}

ToneSequence tone_of_open_manifold(const WarpedModel& model,
                                   const SpectralParams& params,
                                   const std::vector<double>& radii,
                                   int cells_per_radius, double tol) {
  if (radii.empty())
    throw std::invalid_argument("tone_of_open_manifold: no radii given");
  for (size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument(
          "tone_of_open_manifold: radii must be strictly increasing");
  }
  ToneSequence seq;
  seq.radii = radii;
  std::vector<double> values;
  for (double R : radii) {
    ToneResult res = solve_first_tone(model, RadialDomain::ball(R), params,
                                      cells_per_radius, tol);
    values.push_back(res.estimate.value);
    seq.tones.push_back(res.estimate);
  }
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + 1e-9)) seq.monotone = false;
  }
  seq.last = values.back();
  const LimitFit fit = extrapolate_tone_limit(radii, values);
  seq.extrapolated = fit.limit;
  seq.extrapolation = fit.method;
  return seq;
}

}  // namespace ptone
