#include "ptone/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ptone/grid.hpp"

namespace ptone {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::domain_error("growth: " + what);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_window(const WarpedModel& model, double r_lo, double r_hi,
                  int samples) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo))
    fail("window needs 0 < r_lo < r_hi, got [" + fmt(r_lo) + ", " + fmt(r_hi) +
         "]");
  if (r_hi > model.r_max() * (1.0 + 1e-12))
    fail("window end " + fmt(r_hi) + " beyond model validity " +
         fmt(model.r_max()));
  if (samples < 2) fail("window needs at least 2 samples");
}

}  // namespace

GrowthEstimate theta_estimate(const WarpedModel& model, double r_lo,
                              double r_hi, int samples) {
  check_window(model, r_lo, r_hi, samples);

  std::vector<double> rs(static_cast<std::size_t>(samples));
  std::vector<double> ys(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    rs[j] = r_lo + (r_hi - r_lo) * static_cast<double>(j) / (samples - 1);
    ys[j] = log_ball_volume(model, rs[j]);
  }

  double mr = 0.0, my = 0.0;
  for (int j = 0; j < samples; ++j) {
    mr += rs[j];
    my += ys[j];
  }
  mr /= samples;
  my /= samples;
  double sxy = 0.0, sxx = 0.0;
  for (int j = 0; j < samples; ++j) {
    sxy += (rs[j] - mr) * (ys[j] - my);
    sxx += (rs[j] - mr) * (rs[j] - mr);
  }
  double slope = sxy / sxx;
  double intercept = my - slope * mr;
  double ss = 0.0;
  for (int j = 0; j < samples; ++j) {
    double e = ys[j] - (intercept + slope * rs[j]);
    ss += e * e;
  }

  GrowthEstimate out;
  out.theta = std::max(slope, 0.0);  // V is non-decreasing, clamp noise
  out.r_lo = r_lo;
  out.r_hi = r_hi;
  out.fit_residual = std::sqrt(ss / samples);
  out.samples = samples;
  return out;
}

double brooks_bound(double theta, const SpectralParams& params) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    fail("brooks_bound needs theta >= 0");
  return std::pow(theta / params.p, params.p);
}

bool volume_is_infinite(const WarpedModel& model) {
  if (model.r_min() > 0.0 || !model.has_pole())
    fail("volume probe needs a model valid down to the pole");
  double hi = std::min(model.r_max(), 1e4);
  double lo = hi / 10.0;
  double prev = log_ball_volume(model, lo);
  const double step_floor = std::log(1.01);
  for (int s = 1; s <= 10; ++s) {
    double r = lo * std::pow(10.0, s / 10.0);
    double cur = log_ball_volume(model, std::min(r, hi));
    if (!(cur - prev > step_floor)) return false;
    prev = cur;
  }
  return true;
}

CheegerEstimate radial_cheeger(const WarpedModel& model, double r_lo,
                               double r_hi, int samples) {
  check_window(model, r_lo, r_hi, samples);

  CheegerEstimate out;
  out.h = std::numeric_limits<double>::infinity();
  out.profile_r.reserve(static_cast<std::size_t>(samples));
  out.profile_ratio.reserve(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    double r = r_lo + (r_hi - r_lo) * static_cast<double>(j) / (samples - 1);
    double ratio =
        std::exp(log_sphere_area(model, r) - log_ball_volume(model, r));
    out.profile_r.push_back(r);
    out.profile_ratio.push_back(ratio);
    if (ratio < out.h) {
      out.h = ratio;
      out.argmin_r = r;
    }
  }
  out.tail_ratio = out.profile_ratio.back();
  return out;
}

EssentialToneEstimate essential_tone(const WarpedModel& model,
                                     const SpectralParams& params, double r0,
                                     const std::vector<double>& radii,
                                     int cells_per_radius, double tol) {
  if (!(r0 >= 0.0)) fail("essential_tone needs r0 >= 0");
  if (radii.size() < 2) fail("essential_tone needs at least 2 outer radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > r0))
      fail("outer radius " + fmt(radii[i]) + " must exceed r0 = " + fmt(r0));
    if (i > 0 && !(radii[i] > radii[i - 1]))
      fail("outer radii must strictly increase");
  }

  EssentialToneEstimate out;
  out.inner_radius = r0;
  out.radii = radii;
  SolveOptions opts;
  opts.tol = tol;
  for (double R : radii) {
    RadialDomain dom = r0 == 0.0 ? RadialDomain::ball(R)
                                 : RadialDomain::annulus(r0, R);
    RadialGrid grid = build_grid(model, dom, cells_per_radius);
    ToneResult res = solve_first_tone(grid, params, opts);
    out.tones.push_back(res.estimate.value);
  }
  out.last = out.tones.back();
  for (std::size_t i = 1; i < out.tones.size(); ++i)
    if (out.tones[i] > out.tones[i - 1] * (1.0 + 1e-9)) out.monotone = false;

  out.extrapolation = extrapolate_tone_limit(out.radii, out.tones);
  out.value = std::max(out.extrapolation.limit, 0.0);

  GrowthEstimate g = theta_estimate(model, 0.5 * radii.back(), radii.back());
  out.theta = g.theta;
  out.brooks = brooks_bound(g.theta, params);
  out.volume_infinite = volume_is_infinite(model);
  out.brooks_applies = out.volume_infinite;
  out.brooks_ok = !out.brooks_applies ||
                  out.value <= out.brooks * (1.0 + 1e-2) + 1e-12;
  return out;
}

OrderingReport verify_orderings(const GrowthEstimate& growth,
                                const CheegerEstimate& cheeger,
                                const EssentialToneEstimate& ess,
                                const SpectralParams& params) {
  OrderingReport rep;
  rep.h = cheeger.h;
  rep.theta = growth.theta;
  rep.tail_ratio = cheeger.tail_ratio;
  rep.tone = ess.value;
  rep.brooks = brooks_bound(growth.theta, params);

  rep.h_le_theta = rep.h <= rep.theta + 1e-2;
  rep.equality_case =
      std::abs(rep.tail_ratio - rep.h) <= 1e-2 * std::max(1.0, rep.h);
  if (rep.equality_case) {
    if (rep.brooks > 1e-2)
      rep.equality_ok = std::abs(rep.tone - rep.brooks) <= 0.05 * rep.brooks;
    else
      rep.equality_ok = std::abs(rep.tone - rep.brooks) <= 1e-2;
  }
  rep.pass = rep.h_le_theta && rep.equality_ok;

  std::ostringstream note;
  note.precision(17);
  note << "h=" << rep.h << " theta=" << rep.theta
       << " tail=" << rep.tail_ratio << " tone=" << rep.tone
       << " ceiling=" << rep.brooks
       << (rep.equality_case ? " (equality case)" : "");
  rep.note = note.str();
  return rep;
}

}  // namespace ptone
