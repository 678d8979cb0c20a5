// Command-line front end. Direct subcommands (tone, bound, growth,
// ess-tone, cheeger) are translated into scenario text and parsed by the
// same code path as scenario files, so flag and file runs validate
// identically.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptone/fields.hpp"
#include "ptone/grid.hpp"
#include "ptone/growth.hpp"
#include "ptone/report.hpp"
#include "ptone/scenario.hpp"
#include "ptone/solver.hpp"

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Flags {
  int dim = 3;
  double curvature = 0.0;
  std::string warp_table;
  double r_max = 0.0;
  double p = 2.0;
  int grid = 2048;
  double tol = 1e-10;
  double ball = 0.0;
  std::vector<double> annulus;  // r0 r1
  std::vector<double> radii;    // open-domain or exhaustion radii
  std::string field_type;
  double field_value = 1.0;
  std::vector<std::string> field_points;
  std::string method;
  std::vector<double> window;  // growth window lo hi
  int samples = 64;
  double r0 = 1.0;
  std::string format = "json";
  std::string output;
  std::string dump;
};

void add_model_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dim", f.dim, "model dimension (default 3)");
  cmd->add_option("--curvature", f.curvature, "space-form curvature k");
  cmd->add_option("--warp-table", f.warp_table, "two-column r,f table file");
  cmd->add_option("--r-max", f.r_max, "model validity radius");
  cmd->add_option("--p", f.p, "exponent p > 1 (default 2)");
  cmd->add_option("--grid", f.grid, "cells per solve (default 2048)");
  cmd->add_option("--tol", f.tol, "solver tolerance (default 1e-10)");
}

void add_output_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--format", f.format, "report format json|csv");
  cmd->add_option("--output", f.output, "also write the report to this path");
}

void add_domain_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--ball", f.ball, "ball domain of this radius");
  cmd->add_option("--annulus", f.annulus, "annulus domain r0 r1")
      ->expected(2);
  cmd->add_option("--radii", f.radii, "open-domain exhaustion radii")
      ->expected(-1);
}

// Flag count that tolerates options the subcommand does not register.
int count_of(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt ? static_cast<int>(opt->count()) : 0;
}

// Emits flag state as scenario text so parse_scenario_text performs the
// same validation as for files.
std::string scenario_text(const CLI::App* cmd, const Flags& f,
                          const std::string& task) {
  std::ostringstream os;
  os << "[model]\n";
  os << "dim = " << f.dim << "\n";
  if (count_of(cmd, "--curvature")) os << "curvature = " << fmt17(f.curvature) << "\n";
  if (count_of(cmd, "--warp-table")) os << "warp_table = " << f.warp_table << "\n";
  if (count_of(cmd, "--r-max")) os << "r_max = " << fmt17(f.r_max) << "\n";
  os << "[params]\n";
  os << "p = " << fmt17(f.p) << "\n";
  os << "grid = " << f.grid << "\n";
  os << "tol = " << fmt17(f.tol) << "\n";

  bool ess = task == "ess_tone";
  os << "[domain]\n";
  if (count_of(cmd, "--ball")) {
    os << "kind = ball\nR = " << fmt17(f.ball) << "\n";
  } else if (count_of(cmd, "--annulus")) {
    os << "kind = annulus\nr0 = " << fmt17(f.annulus[0]) << "\nr1 = "
       << fmt17(f.annulus[1]) << "\n";
  } else if (!ess && count_of(cmd, "--radii")) {
    os << "kind = open\nR_list =";
    for (double r : f.radii) os << " " << fmt17(r);
    os << "\n";
  }

  if (count_of(cmd, "--field") || count_of(cmd, "--field-value") ||
      count_of(cmd, "--field-points")) {
    os << "[field]\n";
    if (count_of(cmd, "--field")) os << "type = " << f.field_type << "\n";
    if (count_of(cmd, "--field-value"))
      os << "value = " << fmt17(f.field_value) << "\n";
    if (count_of(cmd, "--field-points")) {
      os << "points =";
      for (const auto& tok : f.field_points) os << " " << tok;
      os << "\n";
    }
  }

  if (count_of(cmd, "--window") || count_of(cmd, "--samples")) {
    os << "[growth]\n";
    if (count_of(cmd, "--window"))
      os << "r_lo = " << fmt17(f.window[0]) << "\nr_hi = "
         << fmt17(f.window[1]) << "\n";
    if (count_of(cmd, "--samples")) os << "samples = " << f.samples << "\n";
  }

  if (ess) {
    os << "[ess_tone]\n";
    os << "r0 = " << fmt17(f.r0) << "\n";
    if (count_of(cmd, "--radii")) {
      os << "R_list =";
      for (double r : f.radii) os << " " << fmt17(r);
      os << "\n";
    }
  }

  os << "[tasks]\n";
  os << "task = " << task << "\n";
  os << "[output]\n";
  os << "format = " << f.format << "\n";
  if (!f.output.empty()) os << "path = " << f.output << "\n";
  return os.str();
}

int run_and_report(const ptone::Scenario& sc) {
  ptone::CertificationReport rep = ptone::run_scenario(sc);
  std::cout << ptone::write_report(rep, sc);
  return ptone::exit_code(rep);
}

void dump_eigenfunction(const ptone::Scenario& sc, const std::string& path) {
  if (sc.domain != ptone::Scenario::DomainKind::ball &&
      sc.domain != ptone::Scenario::DomainKind::annulus)
    throw std::invalid_argument(
        "--dump-eigenfunction needs a ball or annulus domain");
  ptone::WarpedModel model = ptone::build_model(sc);
  ptone::SpectralParams params(sc.p);
  ptone::RadialDomain dom =
      sc.domain == ptone::Scenario::DomainKind::ball
          ? ptone::RadialDomain::ball(sc.ball_r)
          : ptone::RadialDomain::annulus(sc.ann_r0, sc.ann_r1);
  ptone::RadialGrid grid = ptone::build_grid(model, dom, sc.grid);
  ptone::SolveOptions opts;
  opts.tol = sc.tol;
  ptone::ToneResult res = ptone::solve_first_tone(grid, params, opts);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write eigenfunction: " + path);
  out << "r,u\n";
  for (int i = 0; i < grid.cells; ++i)
    out << fmt17(grid.centers[i]) << "," << fmt17(res.eigenfunction.values[i])
        << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "first Dirichlet p-eigenvalue workbench for rotationally symmetric "
      "models"};
  app.require_subcommand(1);

  std::string run_path;
  auto* cmd_run = app.add_subcommand("run", "execute a scenario file");
  cmd_run->add_option("scenario", run_path, "scenario file")->required();

  std::string cert_path;
  auto* cmd_cert = app.add_subcommand(
      "certify", "execute a scenario file with certification checks");
  cmd_cert->add_option("scenario", cert_path, "scenario file")->required();

  Flags f;
  auto* cmd_tone = app.add_subcommand("tone", "first-tone solve");
  add_model_flags(cmd_tone, f);
  add_domain_flags(cmd_tone, f);
  add_output_flags(cmd_tone, f);
  cmd_tone->add_option("--dump-eigenfunction", f.dump,
                       "write the eigenfunction as r,u CSV");

  auto* cmd_bound = app.add_subcommand("bound", "lower-bound evaluation");
  add_model_flags(cmd_bound, f);
  add_domain_flags(cmd_bound, f);
  add_output_flags(cmd_bound, f);
  cmd_bound
      ->add_option("--method", f.method,
                   "c_constant|thm2_field|mckean|ball_comparison|"
                   "eigenfield_sharpness|optimize_thm2|optimize_c_constant")
      ->required();
  cmd_bound->add_option("--field", f.field_type,
                        "constant|gradient_distance|canonical_pq|points");
  cmd_bound->add_option("--field-value", f.field_value,
                        "constant field value");
  cmd_bound
      ->add_option("--field-points", f.field_points,
                   "piecewise-linear field as r:a pairs")
      ->expected(-1);

  auto* cmd_growth = app.add_subcommand("growth", "volume growth estimate");
  add_model_flags(cmd_growth, f);
  add_output_flags(cmd_growth, f);
  cmd_growth->add_option("--window", f.window, "fit window lo hi")->expected(2);
  cmd_growth->add_option("--samples", f.samples, "fit samples (default 64)");

  auto* cmd_ess = app.add_subcommand("ess-tone", "tone at infinity");
  add_model_flags(cmd_ess, f);
  add_output_flags(cmd_ess, f);
  cmd_ess->add_option("--r0", f.r0, "removed-ball radius (default 1)");
  cmd_ess->add_option("--radii", f.radii, "increasing outer radii")
      ->expected(-1);

  auto* cmd_cheeger = app.add_subcommand("cheeger", "sphere ratio infimum");
  add_model_flags(cmd_cheeger, f);
  add_output_flags(cmd_cheeger, f);
  cmd_cheeger->add_option("--window", f.window, "window lo hi")->expected(2);
  cmd_cheeger->add_option("--samples", f.samples, "samples (default 64)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      return run_and_report(ptone::parse_scenario(run_path));
    }
    if (cmd_cert->parsed()) {
      ptone::Scenario sc = ptone::parse_scenario(cert_path);
      if (std::find(sc.tasks.begin(), sc.tasks.end(), "certify") ==
          sc.tasks.end())
        sc.tasks.push_back("certify");
      return run_and_report(sc);
    }

    const CLI::App* active = nullptr;
    std::string task;
    if (cmd_tone->parsed()) { active = cmd_tone; task = "tone"; }
    else if (cmd_bound->parsed()) { active = cmd_bound; task = "bound:" + f.method; }
    else if (cmd_growth->parsed()) { active = cmd_growth; task = "growth"; }
    else if (cmd_ess->parsed()) { active = cmd_ess; task = "ess_tone"; }
    else if (cmd_cheeger->parsed()) { active = cmd_cheeger; task = "cheeger"; }
    else return 1;

    ptone::Scenario sc =
        ptone::parse_scenario_text(scenario_text(active, f, task), "cli");
    int code = run_and_report(sc);
    if (cmd_tone->parsed() && !f.dump.empty()) dump_eigenfunction(sc, f.dump);
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
