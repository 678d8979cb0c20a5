#include "ptone/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ptone {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void parse_fail(const std::string& name, int line,
                             const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void validate_fail(const std::string& what) {
  throw std::invalid_argument("scenario: " + what);
}

double to_double(const std::string& name, int line, const std::string& key,
                 const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    parse_fail(name, line, "key '" + key + "': cannot parse number '" + v + "'");
  }
}

int to_int(const std::string& name, int line, const std::string& key,
           const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    parse_fail(name, line, "key '" + key + "': cannot parse integer '" + v + "'");
  }
}

std::vector<std::string> split_tokens(std::string v) {
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream is(v);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<double> to_list(const std::string& name, int line,
                            const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split_tokens(v))
    out.push_back(to_double(name, line, key, tok));
  return out;
}

const std::map<std::string, double>& tolerance_defaults() {
  static const std::map<std::string, double> defaults = {
      {"bound_slack", 1e-6},        // certified bound vs tone
      {"mckean_slack", 1e-6},       // tone vs curvature floor
      {"sharpness_rel", 0.01},      // eigenfield value vs tone
      {"sharpness_spread_rel", 0.05},  // eigenfield functional spread vs tone
      {"brooks_slack", 1e-2},       // essential tone vs growth ceiling
      {"ordering_tol", 1e-2},       // h vs theta
      {"equality_rel", 0.05},       // tone vs ceiling in the equality case
  };
  return defaults;
}

bool known_task(const std::string& t) {
  static const std::vector<std::string> tasks = {
      "tone",
      "growth",
      "ess_tone",
      "cheeger",
      "certify",
      "bound:c_constant",
      "bound:thm2_field",
      "bound:mckean",
      "bound:ball_comparison",
      "bound:eigenfield_sharpness",
      "bound:optimize_thm2",
      "bound:optimize_c_constant",
  };
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

}  // namespace

double Scenario::tolerance(const std::string& key) const {
  auto it = tolerances.find(key);
  if (it != tolerances.end()) return it->second;
  auto d = tolerance_defaults().find(key);
  if (d == tolerance_defaults().end())
    validate_fail("unknown tolerance key '" + key + "'");
  return d->second;
}

Scenario parse_scenario_text(const std::string& text,
                             const std::string& name) {
  Scenario sc;
  sc.name = name;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto pos = s.find('#'); pos != std::string::npos) s = s.substr(0, pos);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(name, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      static const std::vector<std::string> known = {
          "model", "params", "domain", "field", "growth",
          "ess_tone", "tasks", "output", "tolerances"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        parse_fail(name, line, "unknown section [" + section + "]");
      continue;
    }

    auto eq = s.find('=');
    if (eq == std::string::npos)
      parse_fail(name, line, "expected 'key = value', got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) parse_fail(name, line, "empty key");
    if (val.empty()) parse_fail(name, line, "key '" + key + "' has no value");
    if (section.empty())
      parse_fail(name, line, "key '" + key + "' before any section");

    if (section == "model") {
      if (key == "dim") sc.dim = to_int(name, line, key, val);
      else if (key == "curvature") {
        sc.has_curvature = true;
        sc.curvature = to_double(name, line, key, val);
      } else if (key == "warp_table") sc.warp_table = val;
      else if (key == "r_max") {
        sc.has_r_max = true;
        sc.r_max = to_double(name, line, key, val);
      } else parse_fail(name, line, "unknown [model] key '" + key + "'");
    } else if (section == "params") {
      if (key == "p") sc.p = to_double(name, line, key, val);
      else if (key == "grid") sc.grid = to_int(name, line, key, val);
      else if (key == "tol") sc.tol = to_double(name, line, key, val);
      else parse_fail(name, line, "unknown [params] key '" + key + "'");
    } else if (section == "domain") {
      if (key == "kind") {
        if (val == "ball") sc.domain = Scenario::DomainKind::ball;
        else if (val == "annulus") sc.domain = Scenario::DomainKind::annulus;
        else if (val == "open") sc.domain = Scenario::DomainKind::open_list;
        else parse_fail(name, line, "domain kind must be ball|annulus|open");
      } else if (key == "R") sc.ball_r = to_double(name, line, key, val);
      else if (key == "r0") sc.ann_r0 = to_double(name, line, key, val);
      else if (key == "r1") sc.ann_r1 = to_double(name, line, key, val);
      else if (key == "R_list") sc.open_radii = to_list(name, line, key, val);
      else parse_fail(name, line, "unknown [domain] key '" + key + "'");
    } else if (section == "field") {
      if (key == "type") {
        if (val == "constant") sc.field = Scenario::FieldKind::constant;
        else if (val == "gradient_distance")
          sc.field = Scenario::FieldKind::gradient_distance;
        else if (val == "canonical_pq")
          sc.field = Scenario::FieldKind::canonical_pq;
        else if (val == "points") sc.field = Scenario::FieldKind::points;
        else
          parse_fail(name, line,
                     "field type must be "
                     "constant|gradient_distance|canonical_pq|points");
      } else if (key == "value") sc.field_value = to_double(name, line, key, val);
      else if (key == "points") {
        for (const auto& tok : split_tokens(val)) {
          auto colon = tok.find(':');
          if (colon == std::string::npos)
            parse_fail(name, line, "field point '" + tok + "' is not r:a");
          double r = to_double(name, line, key, tok.substr(0, colon));
          double a = to_double(name, line, key, tok.substr(colon + 1));
          sc.field_points.emplace_back(r, a);
        }
      } else parse_fail(name, line, "unknown [field] key '" + key + "'");
    } else if (section == "growth") {
      if (key == "r_lo") {
        sc.has_growth_window = true;
        sc.growth_r_lo = to_double(name, line, key, val);
      } else if (key == "r_hi") {
        sc.has_growth_window = true;
        sc.growth_r_hi = to_double(name, line, key, val);
      } else if (key == "samples")
        sc.growth_samples = to_int(name, line, key, val);
      else parse_fail(name, line, "unknown [growth] key '" + key + "'");
    } else if (section == "ess_tone") {
      if (key == "r0") sc.ess_r0 = to_double(name, line, key, val);
      else if (key == "R_list") sc.ess_radii = to_list(name, line, key, val);
      else parse_fail(name, line, "unknown [ess_tone] key '" + key + "'");
    } else if (section == "tasks") {
      if (key != "task")
        parse_fail(name, line, "unknown [tasks] key '" + key + "'");
      if (!known_task(val)) parse_fail(name, line, "unknown task '" + val + "'");
      sc.tasks.push_back(val);
    } else if (section == "output") {
      if (key == "format") {
        if (val != "json" && val != "csv")
          parse_fail(name, line, "output format must be json|csv");
        sc.format = val;
      } else if (key == "path") sc.out_path = val;
      else parse_fail(name, line, "unknown [output] key '" + key + "'");
    } else if (section == "tolerances") {
      if (tolerance_defaults().find(key) == tolerance_defaults().end())
        parse_fail(name, line, "unknown tolerance key '" + key + "'");
      sc.tolerances[key] = to_double(name, line, key, val);
    }
  }

  // Validation: name the offending key.
  if (sc.dim < 2) validate_fail("dim must be at least 2");
  if (!(sc.p > 1.0) || !std::isfinite(sc.p))
    validate_fail("p must exceed 1");
  if (sc.grid < 2) validate_fail("grid must be at least 2");
  if (!(sc.tol > 0.0)) validate_fail("tol must be positive");
  if (sc.has_curvature && !sc.warp_table.empty())
    validate_fail("model needs curvature or warp_table, not both");
  if (!sc.has_curvature && sc.warp_table.empty())
    validate_fail("model needs curvature or warp_table");
  if (sc.has_r_max) {
    if (!sc.warp_table.empty())
      validate_fail("r_max cannot override a warp_table span");
    if (!(sc.r_max > 0.0)) validate_fail("r_max must be positive");
  }
  switch (sc.domain) {
    case Scenario::DomainKind::none:
      break;
    case Scenario::DomainKind::ball:
      if (!(sc.ball_r > 0.0)) validate_fail("ball domain needs R > 0");
      break;
    case Scenario::DomainKind::annulus:
      if (!(sc.ann_r0 >= 0.0) || !(sc.ann_r1 > sc.ann_r0))
        validate_fail("annulus needs 0 <= r0 < r1");
      break;
    case Scenario::DomainKind::open_list:
      if (sc.open_radii.size() < 2)
        validate_fail("open domain needs R_list with at least 2 radii");
      for (std::size_t i = 0; i < sc.open_radii.size(); ++i) {
        if (!(sc.open_radii[i] > 0.0))
          validate_fail("R_list entries must be positive");
        if (i > 0 && !(sc.open_radii[i] > sc.open_radii[i - 1]))
          validate_fail("R_list must strictly increase");
      }
      break;
  }
  if (sc.field == Scenario::FieldKind::points) {
    if (sc.field_points.size() < 2)
      validate_fail("field points needs at least 2 r:a pairs");
    for (std::size_t i = 1; i < sc.field_points.size(); ++i)
      if (!(sc.field_points[i].first > sc.field_points[i - 1].first))
        validate_fail("field points must have strictly increasing r");
  }
  if (sc.has_growth_window) {
    if (!(sc.growth_r_lo > 0.0) || !(sc.growth_r_hi > sc.growth_r_lo))
      validate_fail("growth window needs 0 < r_lo < r_hi");
  }
  if (sc.growth_samples < 2) validate_fail("growth samples must be at least 2");
  if (!(sc.ess_r0 >= 0.0)) validate_fail("ess_tone r0 must be nonnegative");
  for (std::size_t i = 0; i < sc.ess_radii.size(); ++i) {
    if (!(sc.ess_radii[i] > sc.ess_r0))
      validate_fail("ess_tone R_list entries must exceed r0");
    if (i > 0 && !(sc.ess_radii[i] > sc.ess_radii[i - 1]))
      validate_fail("ess_tone R_list must strictly increase");
  }
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  std::string name = path;
  if (auto slash = name.find_last_of("/\\"); slash != std::string::npos)
    name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0)
    name = name.substr(0, dot);
  return parse_scenario_text(buf.str(), name);
}

WarpedModel build_model(const Scenario& sc) {
  if (!sc.warp_table.empty()) {
    std::ifstream in(sc.warp_table);
    if (!in) throw std::runtime_error("cannot open warp table: " + sc.warp_table);
    std::vector<std::pair<double, double>> rows;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw;
      if (auto pos = s.find('#'); pos != std::string::npos)
        s = s.substr(0, pos);
      s = trim(s);
      if (s.empty()) continue;
      auto toks = split_tokens(s);
      if (toks.size() != 2)
        parse_fail(sc.warp_table, line, "expected two columns r,f");
      rows.emplace_back(to_double(sc.warp_table, line, "r", toks[0]),
                        to_double(sc.warp_table, line, "f", toks[1]));
    }
    return WarpedModel::from_table(sc.dim, std::move(rows));
  }
  if (sc.has_r_max)
    return WarpedModel::space_form(sc.dim, sc.curvature, sc.r_max);
  return WarpedModel::space_form(sc.dim, sc.curvature);
}

std::pair<double, double> growth_window(const Scenario& sc,
                                        const WarpedModel& model) {
  if (sc.has_growth_window) {
    if (sc.growth_r_hi > model.r_max() * (1.0 + 1e-12))
      validate_fail("growth r_hi exceeds the model extent");
    return {sc.growth_r_lo, sc.growth_r_hi};
  }
  double rm = model.r_max();
  if (rm > 1e6)
    validate_fail(
        "growth window required (growth.r_lo, growth.r_hi): the model extent "
        "is unbounded");
  return {0.5 * rm, rm};
}

}  // namespace ptone
