#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ptone/geometry.hpp"

namespace ptone {

// One run description parsed from a flat sectioned key = value file.
// Sections: [model] [params] [domain] [field] [growth] [ess_tone] [tasks]
// [output] [tolerances]; '#' starts a comment anywhere on a line.
struct Scenario {
  std::string name;

  // [model]
  int dim = 3;
  bool has_curvature = false;
  double curvature = 0.0;
  std::string warp_table;  // path to a two-column r,f file
  bool has_r_max = false;
  double r_max = 0.0;

  // [params]
  double p = 2.0;
  int grid = 2048;
  double tol = 1e-10;

  // [domain]
  enum class DomainKind { none, ball, annulus, open_list };
  DomainKind domain = DomainKind::none;
  double ball_r = 0.0;
  double ann_r0 = 0.0;
  double ann_r1 = 0.0;
  std::vector<double> open_radii;

  // [field]
  enum class FieldKind { none, constant, gradient_distance, canonical_pq,
                         points };
  FieldKind field = FieldKind::none;
  double field_value = 1.0;
  std::vector<std::pair<double, double>> field_points;

  // [growth]
  bool has_growth_window = false;
  double growth_r_lo = 0.0;
  double growth_r_hi = 0.0;
  int growth_samples = 64;

  // [ess_tone]
  double ess_r0 = 1.0;
  std::vector<double> ess_radii;

  // [tasks] : tone | bound:<method> | growth | ess_tone | cheeger | certify
  std::vector<std::string> tasks;

  // [output]
  std::string format = "json";  // json | csv
  std::string out_path;         // empty: stdout only

  // [tolerances] named pass/fail tolerances with documented defaults
  std::map<std::string, double> tolerances;

  double tolerance(const std::string& key) const;
};

// Parse and validate. Errors carry "<name>:<line>: message" for syntax
// problems and the offending key for validation problems.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& name);

// Instantiate the model block (space form or warp table file).
WarpedModel build_model(const Scenario& sc);

// Growth window: explicit when given, else [r_max/2, r_max] for models
// with a usable finite extent.
std::pair<double, double> growth_window(const Scenario& sc,
                                        const WarpedModel& model);

}  // namespace ptone
