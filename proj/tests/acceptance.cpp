// Acceptance gate for the workbench: eleven numbered checks, one
// PASS/FAIL line each, exit code = number of failures.
//
// argv[1]: path to the ptone binary (for the determinism check)
// argv[2]: path to the golden scenario directory

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ptone/fields.hpp"
#include "ptone/geometry.hpp"
#include "ptone/grid.hpp"
#include "ptone/growth.hpp"
#include "ptone/report.hpp"
#include "ptone/scenario.hpp"
#include "ptone/solver.hpp"

using namespace ptone;

namespace {

constexpr double kPiSq = 9.869604401089358;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

bool close_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

struct Harness {
  int failures = 0;

  void run(int id, const char* label,
           const std::function<std::string()>& body) {
    std::string msg;
    try {
      msg = body();  // empty on pass, reason on failure
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", msg.empty() ? "PASS" : "FAIL",
                id, label, msg.empty() ? "" : " -- ", msg.c_str());
    std::fflush(stdout);
    if (!msg.empty()) ++failures;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- criterion bodies -------------------------------------------------

std::string crit_interval_p2() {
  RadialGrid g = flat_interval_grid(0.0, 1.0, 2048);
  ToneResult r = solve_first_tone(g, SpectralParams(2.0), {});
  if (!close_rel(r.estimate.value, kPiSq, 1e-3))
    return "lambda = " + fmt(r.estimate.value) + ", pi^2 off by more than 0.1%";
  return "";
}

std::string crit_interval_p3() {
  const double target = 28.28876197600255;  // (p-1)(2 pi/(p sin(pi/p)))^p, p=3
  SpectralParams p3(3.0);
  RadialGrid g = flat_interval_grid(0.0, 1.0, 2048);
  ToneResult r = solve_first_tone(g, p3, {});
  if (!close_rel(r.estimate.value, target, 5e-3))
    return "lambda = " + fmt(r.estimate.value) + ", target " + fmt(target) +
           " off by more than 0.5%";

  RadialGrid tiny = flat_interval_grid(0.0, 1.0, 5);
  ToneResult s = solve_first_tone(tiny, p3, {});
  double brute = brute_force_tone(tiny, p3);
  if (!close_rel(s.estimate.value, brute, 1e-3))
    return "N=5 solver " + fmt(s.estimate.value) + " vs brute " + fmt(brute) +
           " beyond 1e-3";
  return "";
}

std::string crit_euclid_ball() {
  SpectralParams p2(2.0);
  auto e3 = WarpedModel::space_form(3, 0.0);
  RadialDomain ball = RadialDomain::ball(1.0);
  ToneResult r = solve_first_tone(e3, ball, p2, 4096);
  if (!close_rel(r.estimate.value, kPiSq, 2e-3))
    return "lambda = " + fmt(r.estimate.value) + ", pi^2 off by more than 0.2%";
  BoundReport b = ball_comparison_bound(e3, ball, p2);
  if (!b.valid || std::abs(b.value - 2.25) > 1e-9)
    return "ball comparison bound " + fmt(b.value) + " != 2.25";
  if (!(b.value <= r.estimate.value))
    return "bound " + fmt(b.value) + " exceeds lambda " + fmt(r.estimate.value);
  return "";
}

std::string crit_curvature_floor_grid() {
  for (int n : {2, 3, 4}) {
    for (double c : {1.0, 2.0}) {
      auto model = WarpedModel::space_form(n, -c * c);
      for (double pexp : {1.5, 2.0, 3.0}) {
        SpectralParams sp(pexp);
        std::vector<double> radii = {3.0 / c, 6.0 / c, 10.0 / c, 15.0 / c};
        ToneSequence seq = tone_of_open_manifold(model, sp, radii, 2048);
        std::string tag = "(n=" + std::to_string(n) + ", c=" + fmt(c) +
                          ", p=" + fmt(pexp) + ")";
        if (!seq.monotone) return "tones not non-increasing at " + tag;
        double floor = mckean_bound(n, c, sp) * (1.0 - 1e-6);
        for (std::size_t i = 0; i < seq.tones.size(); ++i)
          if (!(seq.tones[i].value >= floor))
            return "tone " + fmt(seq.tones[i].value) + " at R=" +
                   fmt(radii[i]) + " under the floor " + fmt(floor) + " " + tag;
        if (pexp == 2.0) {
          double limit = 0.25 * (n - 1) * (n - 1) * c * c;
          if (!close_rel(seq.extrapolated, limit, 0.02))
            return "extrapolated " + fmt(seq.extrapolated) + " vs " +
                   fmt(limit) + " beyond 2% " + tag;
        }
      }
    }
  }
  return "";
}

std::string crit_young_machinery() {
  std::mt19937 rng(0xacce5501u);
  std::uniform_real_distribution<double> coef(0.1, 10.0);
  std::uniform_real_distribution<double> expo(1.2, 4.0);
  for (int t = 0; t < 100; ++t) {
    double A = coef(rng), B = coef(rng), pexp = expo(rng);
    YoungParams yp{A, B, pexp, pexp / (pexp - 1.0)};
    YoungMax ym = young_psi_max(yp);
    double hi = 3.0 * ym.eps_star + 1.0;
    double eps = oracles::golden_max(
        [&](double e) { return young_psi(yp, e); }, 0.0, hi);
    double ref = young_psi(yp, eps);
    if (std::abs(ym.psi_max - ref) >
        1e-10 * std::max(1.0, std::max(std::abs(ym.psi_max), std::abs(ref))))
      return "psi_max " + fmt(ym.psi_max) + " vs golden " + fmt(ref) +
             " at (A,B,p)=(" + fmt(A) + "," + fmt(B) + "," + fmt(pexp) + ")";
  }
  for (int t = 0; t < 100; ++t) {
    double A = coef(rng), s = coef(rng), pexp = expo(rng);
    double q = pexp / (pexp - 1.0);
    double direct = std::pow(A / s, pexp) / std::pow(pexp, pexp);
    YoungMax ym = young_psi_max({A, std::pow(s, q) / q, pexp, q});
    double chained = ym.psi_max / std::pow(pexp, pexp - 1.0);
    if (std::abs(chained - direct) > 1e-12 * std::max(1.0, std::abs(direct)))
      return "chain identity off: " + fmt(chained) + " vs " + fmt(direct) +
             " at (A,s,p)=(" + fmt(A) + "," + fmt(s) + "," + fmt(pexp) + ")";
  }
  return "";
}

std::string crit_eigenfield_sharpness() {
  SpectralParams p2(2.0);
  struct Case {
    WarpedModel model;
    double R;
    const char* tag;
  };
  std::vector<Case> cases;
  cases.push_back({WarpedModel::space_form(3, 0.0), 1.0, "euclidean n=3 R=1"});
  cases.push_back({WarpedModel::space_form(2, -1.0), 3.0, "hyperbolic n=2 R=3"});
  cases.push_back({WarpedModel::space_form(3, -1.0), 2.0, "hyperbolic n=3 R=2"});
  for (const Case& c : cases) {
    ToneResult r = solve_first_tone(c.model, RadialDomain::ball(c.R), p2, 4096);
    double lam = r.estimate.value;
    BoundReport s = eigenfield_sharpness(c.model, p2, r.eigenfunction);
    if (std::abs(s.value - lam) > 0.01 * lam)
      return std::string(c.tag) + ": sharpness " + fmt(s.value) +
             " vs lambda " + fmt(lam) + " beyond 1%";
    double spread = s.functional_max - s.functional_min;
    if (!(spread <= 0.05 * lam))
      return std::string(c.tag) + ": functional spread " + fmt(spread) +
             " exceeds 5% of lambda " + fmt(lam);
  }
  return "";
}

std::string crit_volume_growth() {
  for (int n : {2, 3, 4}) {
    for (double c : {1.0, 2.0}) {
      auto model = WarpedModel::space_form(n, -c * c);
      double theta = theta_estimate(model, 20.0 / c, 40.0 / c).theta;
      double target = (n - 1) * c;
      if (!close_rel(theta, target, 0.01))
        return "theta(" + std::to_string(n) + ", c=" + fmt(c) + ") = " +
               fmt(theta) + " vs " + fmt(target) + " beyond 1%";
    }
  }
  double flat = theta_estimate(WarpedModel::space_form(3, 0.0), 1000.0,
                               2000.0).theta;
  if (!(flat <= 0.02))
    return "euclidean theta " + fmt(flat) + " above 0.02";
  return "";
}

std::string crit_tail_tone() {
  SpectralParams p2(2.0);
  auto h2 = WarpedModel::space_form(2, -1.0);
  EssentialToneEstimate est =
      essential_tone(h2, p2, 1.0, {8.0, 12.0, 16.0, 20.0}, 2048);
  if (!est.brooks_applies)
    return "growth ceiling unexpectedly not applicable";
  if (!est.brooks_ok)
    return "tail tone " + fmt(est.value) + " above ceiling " +
           fmt(est.brooks * 1.01);
  if (std::abs(est.value - 0.25) > 0.005)
    return "tail tone " + fmt(est.value) + " not within 2% of 0.25";
  return "";
}

std::string crit_cheeger_ordering(const std::string& scenario_dir) {
  SpectralParams p2(2.0);
  const char* names[] = {"euclid_ball.scn", "h2_mckean.scn", "h2_growth.scn"};
  for (const char* name : names) {
    Scenario sc = parse_scenario(scenario_dir + "/" + name);
    WarpedModel model = build_model(sc);
    auto [lo, hi] = growth_window(sc, model);
    double theta = theta_estimate(model, lo, hi, sc.growth_samples).theta;
    double h = radial_cheeger(model, lo, hi, sc.growth_samples).h;
    if (!(h <= theta + 1e-2))
      return std::string(name) + ": h = " + fmt(h) + " above theta = " +
             fmt(theta) + " + 1e-2";
  }

  auto h2 = WarpedModel::space_form(2, -1.0);
  double theta = theta_estimate(h2, 10.0, 30.0).theta;
  double h = radial_cheeger(h2, 10.0, 30.0).h;
  if (std::abs(h - theta) > 0.01 * theta)
    return "equality case |h - theta| = " + fmt(std::abs(h - theta)) +
           " beyond 1% of theta " + fmt(theta);
  EssentialToneEstimate est =
      essential_tone(h2, p2, 1.0, {8.0, 12.0, 16.0, 20.0}, 1024);
  double ceiling = brooks_bound(theta, p2);
  if (std::abs(est.value - ceiling) > 0.05 * ceiling)
    return "tone " + fmt(est.value) + " not within 5% of theta^2/4 = " +
           fmt(ceiling);
  return "";
}

std::string crit_sandwich_suite() {
  std::mt19937 rng(0x5a8d71c3u);
  std::uniform_real_distribution<double> curv(-4.0, 0.0);
  std::uniform_real_distribution<double> expo(1.2, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> fval(-3.0, 3.0);

  for (int t = 0; t < 50; ++t) {
    int n = 2 + static_cast<int>(rng() % 3);
    double k = curv(rng);
    double pexp = expo(rng);
    auto model = WarpedModel::space_form(n, k);
    SpectralParams sp(pexp);

    RadialDomain dom = RadialDomain::ball(1.0);
    if (rng() % 2 == 0) {
      dom = RadialDomain::ball(0.5 + 4.5 * unit(rng));
    } else {
      double r0 = 0.1 + 1.9 * unit(rng);
      dom = RadialDomain::annulus(r0, r0 + 0.5 + 3.5 * unit(rng));
    }

    int knot_count = 5 + static_cast<int>(rng() % 5);
    std::vector<double> knots(static_cast<std::size_t>(knot_count));
    std::vector<double> vals(static_cast<std::size_t>(knot_count));
    double span = dom.r1 * 1.2;
    for (int j = 0; j < knot_count; ++j) {
      knots[j] = span * (j + unit(rng) * 0.5) / knot_count;
      vals[j] = fval(rng);
    }
    RadialField X = RadialField::piecewise_linear(knots, vals);

    ToneResult r = solve_first_tone(model, dom, sp, 1024);
    double cap = r.estimate.value * (1.0 + 1e-6);
    std::string tag = "case " + std::to_string(t) + " (n=" +
                      std::to_string(n) + ", k=" + fmt(k) + ", p=" +
                      fmt(pexp) + ")";

    BoundReport t2 = thm2_bound(model, dom, sp, X);
    if (t2.valid && !(t2.value <= cap))
      return tag + ": pointwise bound " + fmt(t2.value) + " above tone " +
             fmt(r.estimate.value);
    BoundReport t1 = c_constant_bound(model, dom, sp, X);
    if (t1.valid && !(t1.value <= cap))
      return tag + ": constant bound " + fmt(t1.value) + " above tone " +
             fmt(r.estimate.value);
  }
  return "";
}

std::string crit_determinism(const std::string& binary,
                             const std::string& scenario_dir) {
  if (binary.empty() || scenario_dir.empty())
    return "binary or scenario directory argument missing";
  std::string scen = scenario_dir + "/euclid_ball.scn";
  std::string out1 = "acceptance_det_1.json";
  std::string out2 = "acceptance_det_2.json";
  std::string base = "\"" + binary + "\" certify \"" + scen + "\"";
  int rc1 = std::system((base + " > " + out1 + " 2>/dev/null").c_str());
  int rc2 = std::system((base + " > " + out2 + " 2>/dev/null").c_str());
  if (rc1 == -1 || rc2 == -1) return "could not spawn the binary";
  if (rc1 != rc2)
    return "exit statuses differ: " + std::to_string(rc1) + " vs " +
           std::to_string(rc2);
  std::string a = read_file(out1);
  std::string b = read_file(out2);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
  if (a.empty()) return "first run produced no output";
  if (a != b) return "reports differ between runs";
  if (a.find("\"verdict\": \"pass\"") == std::string::npos)
    return "golden certify run did not pass";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  std::string binary = argc > 1 ? argv[1] : "";
  std::string scenario_dir = argc > 2 ? argv[2] : "";

  Harness h;
  h.run(1, "interval tone, p=2, matches pi^2 to 0.1%", crit_interval_p2);
  h.run(2, "interval tone, p=3, closed form + brute force", crit_interval_p3);
  h.run(3, "euclidean ball tone and comparison bound", crit_euclid_ball);
  h.run(4, "curvature floor certified on the hyperbolic grid",
        crit_curvature_floor_grid);
  h.run(5, "young payoff closed forms", crit_young_machinery);
  h.run(6, "eigenfield reproduces the tone to 1%", crit_eigenfield_sharpness);
  h.run(7, "volume growth exponents", crit_volume_growth);
  h.run(8, "tail tone under the growth ceiling", crit_tail_tone);
  h.run(9, "cheeger ordering and equality case",
        [&] { return crit_cheeger_ordering(scenario_dir); });
  h.run(10, "randomized sandwich suite", crit_sandwich_suite);
  h.run(11, "byte-identical certification reruns",
        [&] { return crit_determinism(binary, scenario_dir); });

  std::printf("%d of 11 criteria passed\n", 11 - h.failures);
  return h.failures;
}
