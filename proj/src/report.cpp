#include "ptone/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ptone/fields.hpp"
#include "ptone/grid.hpp"
#include "ptone/growth.hpp"
#include "ptone/solver.hpp"

namespace ptone {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

RadialDomain compact_domain(const Scenario& sc) {
  if (sc.domain == Scenario::DomainKind::ball)
    return RadialDomain::ball(sc.ball_r);
  if (sc.domain == Scenario::DomainKind::annulus)
    return RadialDomain::annulus(sc.ann_r0, sc.ann_r1);
  throw std::invalid_argument(
      "scenario: this task needs a ball or annulus domain");
}

RadialField scenario_field(const Scenario& sc, const WarpedModel& model,
                           const RadialDomain& dom,
                           const SpectralParams& params) {
  switch (sc.field) {
    case Scenario::FieldKind::none:
    case Scenario::FieldKind::gradient_distance:
      return RadialField::gradient_distance();
    case Scenario::FieldKind::constant:
      return RadialField::constant(sc.field_value);
    case Scenario::FieldKind::canonical_pq:
      return canonical_ball_field(model, dom, params);
    case Scenario::FieldKind::points: {
      std::vector<double> knots, vals;
      for (auto [r, a] : sc.field_points) {
        knots.push_back(r);
        vals.push_back(a);
      }
      return RadialField::piecewise_linear(std::move(knots), std::move(vals));
    }
  }
  throw std::invalid_argument("scenario: unhandled field kind");
}

// Mutable state threaded through the task list: solves and estimates are
// computed once and reused by later rows and by certify.
struct RunContext {
  std::optional<WarpedModel> model;
  SpectralParams params{2.0};
  std::optional<ToneResult> tone;       // compact-domain solve
  std::optional<double> tone_value;     // compact or open-limit tone
  std::string tone_detail;
  std::optional<GrowthEstimate> growth;
  std::optional<CheegerEstimate> cheeger;
  std::optional<EssentialToneEstimate> ess;
  std::optional<BoundReport> sharp;
  std::optional<BoundReport> mckean;
  std::vector<BoundReport> certified;   // valid certified lower bounds
};

void ensure_tone(const Scenario& sc, RunContext& ctx) {
  if (ctx.tone_value.has_value()) return;
  if (sc.domain == Scenario::DomainKind::open_list) {
    ToneSequence seq = tone_of_open_manifold(*ctx.model, ctx.params,
                                             sc.open_radii, sc.grid, sc.tol);
    ctx.tone_value = seq.extrapolated;
    std::ostringstream d;
    d.precision(17);
    d << "open-manifold limit via " << seq.extrapolation
      << ", last tone " << seq.last << " at R=" << sc.open_radii.back()
      << (seq.monotone ? "" : ", non-monotone sequence");
    ctx.tone_detail = d.str();
    return;
  }
  RadialDomain dom = compact_domain(sc);
  RadialGrid grid = build_grid(*ctx.model, dom, sc.grid);
  SolveOptions opts;
  opts.tol = sc.tol;
  ctx.tone = solve_first_tone(grid, ctx.params, opts);
  ctx.tone_value = ctx.tone->estimate.value;
  std::ostringstream d;
  d.precision(17);
  d << to_string(ctx.tone->estimate.kind) << ", cells=" << sc.grid
    << ", iterations=" << ctx.tone->estimate.iterations
    << ", residual=" << ctx.tone->estimate.residual;
  ctx.tone_detail = d.str();
}

TaskRecord bound_record(const std::string& task, const std::string& key,
                        const BoundReport& b) {
  TaskRecord rec;
  rec.task = task;
  rec.key = key;
  rec.value = b.value;
  if (!b.valid) rec.kind = "invalid";
  else if (b.certified) rec.kind = "lower_bound";
  else rec.kind = "estimate";
  rec.detail = "field " + b.field_tag + "; " + b.note;
  return rec;
}

void run_task(const Scenario& sc, const std::string& task, RunContext& ctx,
              CertificationReport& rep) {
  const WarpedModel& model = *ctx.model;

  if (task == "tone") {
    ensure_tone(sc, ctx);
    TaskRecord rec;
    rec.task = task;
    rec.key = "tone";
    rec.value = *ctx.tone_value;
    rec.kind = ctx.tone ? to_string(ctx.tone->estimate.kind) : "extrapolated";
    rec.detail = ctx.tone_detail;
    rep.results.push_back(rec);
    return;
  }

  if (task == "bound:mckean") {
    ctx.mckean = mckean_bound_for(model, ctx.params);
    rep.results.push_back(bound_record(task, "bound.mckean", *ctx.mckean));
    if (ctx.mckean->valid) ctx.certified.push_back(*ctx.mckean);
    return;
  }

  if (task == "bound:ball_comparison") {
    RadialDomain dom = compact_domain(sc);
    BoundReport b = ball_comparison_bound(model, dom, ctx.params);
    rep.results.push_back(bound_record(task, "bound.ball_comparison", b));
    if (b.valid) ctx.certified.push_back(b);
    return;
  }

  if (task == "bound:c_constant" || task == "bound:thm2_field") {
    RadialDomain dom = compact_domain(sc);
    RadialField X = scenario_field(sc, model, dom, ctx.params);
    BoundReport b = task == "bound:c_constant"
                        ? c_constant_bound(model, dom, ctx.params, X)
                        : thm2_bound(model, dom, ctx.params, X);
    std::string key = task == "bound:c_constant" ? "bound.c_constant"
                                                 : "bound.thm2_field";
    rep.results.push_back(bound_record(task, key, b));
    if (b.valid && b.certified) ctx.certified.push_back(b);
    return;
  }

  if (task == "bound:eigenfield_sharpness") {
    if (sc.domain == Scenario::DomainKind::open_list)
      throw std::invalid_argument(
          "scenario: eigenfield sharpness needs a compact domain");
    ensure_tone(sc, ctx);
    ctx.sharp = eigenfield_sharpness(model, ctx.params, ctx.tone->eigenfunction);
    rep.results.push_back(
        bound_record(task, "bound.eigenfield_sharpness", *ctx.sharp));
    return;
  }

  if (task == "bound:optimize_thm2" || task == "bound:optimize_c_constant") {
    RadialDomain dom = compact_domain(sc);
    BoundMethod method = task == "bound:optimize_thm2"
                             ? BoundMethod::thm2_field
                             : BoundMethod::c_constant;
    const RadialFunction* u =
        ctx.tone.has_value() ? &ctx.tone->eigenfunction : nullptr;
    std::optional<double> ref = ctx.tone_value;
    BoundReport b = optimize_field_family(model, dom, ctx.params, method, {},
                                          u, ref);
    std::string key = task == "bound:optimize_thm2"
                          ? "bound.optimize_thm2"
                          : "bound.optimize_c_constant";
    rep.results.push_back(bound_record(task, key, b));
    if (b.valid && b.certified) ctx.certified.push_back(b);
    return;
  }

  if (task == "growth") {
    auto [lo, hi] = growth_window(sc, model);
    ctx.growth = theta_estimate(model, lo, hi, sc.growth_samples);
    TaskRecord t;
    t.task = task;
    t.key = "theta";
    t.value = ctx.growth->theta;
    t.kind = "value";
    t.detail = "window [" + fmt17(lo) + ", " + fmt17(hi) + "], residual " +
               fmt17(ctx.growth->fit_residual);
    rep.results.push_back(t);
    TaskRecord b;
    b.task = task;
    b.key = "brooks_bound";
    b.value = brooks_bound(ctx.growth->theta, ctx.params);
    b.kind = "value";
    b.detail = "theta^p / p^p at p = " + fmt17(ctx.params.p);
    rep.results.push_back(b);
    return;
  }

  if (task == "cheeger") {
    auto [lo, hi] = growth_window(sc, model);
    ctx.cheeger = radial_cheeger(model, lo, hi, sc.growth_samples);
    TaskRecord rec;
    rec.task = task;
    rec.key = "cheeger_h";
    rec.value = ctx.cheeger->h;
    rec.kind = "value";
    rec.detail = "argmin r = " + fmt17(ctx.cheeger->argmin_r) +
                 ", tail ratio " + fmt17(ctx.cheeger->tail_ratio);
    rep.results.push_back(rec);
    return;
  }

  if (task == "ess_tone") {
    if (sc.ess_radii.empty())
      throw std::invalid_argument("scenario: ess_tone needs R_list");
    ctx.ess =
        essential_tone(model, ctx.params, sc.ess_r0, sc.ess_radii, sc.grid,
                       sc.tol);
    TaskRecord rec;
    rec.task = task;
    rec.key = "ess_tone";
    rec.value = ctx.ess->value;
    rec.kind = "value";
    rec.detail = "limit via " + ctx.ess->extrapolation.method + ", last " +
                 fmt17(ctx.ess->last) + ", theta " + fmt17(ctx.ess->theta) +
                 (ctx.ess->monotone ? "" : ", non-monotone");
    rep.results.push_back(rec);

    if (ctx.ess->brooks_applies) {
      double slack = sc.tolerance("brooks_slack");
      TaskRecord chk;
      chk.task = task;
      chk.key = "check.brooks_ceiling";
      chk.value = ctx.ess->value;
      chk.kind = "check";
      chk.has_check = true;
      chk.tolerance = slack;
      chk.rule = "ess_tone <= theta^p/p^p (1+tol) on infinite volume";
      chk.pass =
          ctx.ess->value <= ctx.ess->brooks * (1.0 + slack) + 1e-12;
      chk.detail = "ceiling " + fmt17(ctx.ess->brooks);
      rep.results.push_back(chk);
    }
    return;
  }

  throw std::invalid_argument("scenario: unhandled task '" + task + "'");
}

void run_certify(const Scenario& sc, RunContext& ctx,
                 CertificationReport& rep) {
  if (ctx.mckean && ctx.mckean->valid && ctx.tone_value) {
    double slack = sc.tolerance("mckean_slack");
    TaskRecord chk;
    chk.task = "certify";
    chk.key = "check.mckean_lower_bound";
    chk.value = ctx.mckean->value;
    chk.kind = "check";
    chk.has_check = true;
    chk.tolerance = slack;
    chk.rule = "tone >= bound (1-tol)";
    chk.pass = *ctx.tone_value >= ctx.mckean->value * (1.0 - slack);
    chk.detail = "tone " + fmt17(*ctx.tone_value);
    rep.results.push_back(chk);
  }

  if (ctx.tone_value) {
    double slack = sc.tolerance("bound_slack");
    for (const BoundReport& b : ctx.certified) {
      TaskRecord chk;
      chk.task = "certify";
      chk.key = "check.sandwich." + to_string(b.method);
      chk.value = b.value;
      chk.kind = "check";
      chk.has_check = true;
      chk.tolerance = slack;
      chk.rule = "lower bound <= tone (1+tol)";
      chk.pass = b.value <= *ctx.tone_value * (1.0 + slack);
      chk.detail = "tone " + fmt17(*ctx.tone_value);
      rep.results.push_back(chk);
    }
  }

  if (ctx.sharp && ctx.tone_value) {
    double tone = *ctx.tone_value;
    {
      double tol = sc.tolerance("sharpness_rel");
      TaskRecord chk;
      chk.task = "certify";
      chk.key = "check.thm2_sharpness";
      chk.value = ctx.sharp->value;
      chk.kind = "check";
      chk.has_check = true;
      chk.tolerance = tol;
      chk.rule = "|sharpness - tone| <= tol tone";
      chk.pass = std::abs(ctx.sharp->value - tone) <= tol * tone;
      chk.detail = "tone " + fmt17(tone);
      rep.results.push_back(chk);
    }
    {
      double tol = sc.tolerance("sharpness_spread_rel");
      TaskRecord chk;
      chk.task = "certify";
      chk.key = "check.thm2_spread";
      chk.value = ctx.sharp->functional_max - ctx.sharp->functional_min;
      chk.kind = "check";
      chk.has_check = true;
      chk.tolerance = tol;
      chk.rule = "functional spread <= tol tone";
      chk.pass = chk.value <= tol * tone;
      chk.detail = "tone " + fmt17(tone);
      rep.results.push_back(chk);
    }
  }

  if (ctx.growth && ctx.cheeger && ctx.ess) {
    OrderingReport ord =
        verify_orderings(*ctx.growth, *ctx.cheeger, *ctx.ess, ctx.params);
    TaskRecord chk;
    chk.task = "certify";
    chk.key = "ordering_pass";
    chk.value = ord.pass ? 1.0 : 0.0;
    chk.kind = "check";
    chk.has_check = true;
    chk.tolerance = 1e-2;
    chk.rule = "h <= theta + tol; equality case pins tone to the ceiling";
    chk.pass = ord.pass;
    chk.detail = ord.note;
    rep.results.push_back(chk);
  }
}

}  // namespace

std::string CertificationReport::verdict() const {
  if (had_error) return "error";
  return overall_pass ? "pass" : "fail";
}

CertificationReport run_scenario(const Scenario& sc) {
  CertificationReport rep;
  rep.scenario = sc.name;

  RunContext ctx;
  try {
    ctx.model = build_model(sc);
    ctx.params = SpectralParams(sc.p);
  } catch (const std::exception& e) {
    TaskRecord rec;
    rec.task = "model";
    rec.key = "error.model";
    rec.kind = "error";
    rec.detail = e.what();
    rep.results.push_back(rec);
    rep.had_error = true;
    return rep;
  }

  bool want_certify = false;
  for (const std::string& task : sc.tasks) {
    if (task == "certify") {
      want_certify = true;
      continue;
    }
    try {
      run_task(sc, task, ctx, rep);
    } catch (const std::exception& e) {
      TaskRecord rec;
      rec.task = task;
      rec.key = "error." + task;
      rec.kind = "error";
      rec.detail = e.what();
      rep.results.push_back(rec);
      rep.had_error = true;
    }
  }
  if (want_certify) {
    try {
      run_certify(sc, ctx, rep);
    } catch (const std::exception& e) {
      TaskRecord rec;
      rec.task = "certify";
      rec.key = "error.certify";
      rec.kind = "error";
      rec.detail = e.what();
      rep.results.push_back(rec);
      rep.had_error = true;
    }
  }

  for (const TaskRecord& r : rep.results)
    if (r.has_check && !r.pass) rep.overall_pass = false;
  return rep;
}

std::string to_json(const CertificationReport& rep) {
  std::ostringstream os;
  os << "{\n  \"scenario\": \"" << json_escape(rep.scenario) << "\",\n";
  os << "  \"results\": [";
  for (std::size_t i = 0; i < rep.results.size(); ++i) {
    const TaskRecord& r = rep.results[i];
    os << (i == 0 ? "\n" : ",\n");
    os << "    {\"task\": \"" << json_escape(r.task) << "\", \"key\": \""
       << json_escape(r.key) << "\", \"value\": " << fmt17(r.value)
       << ", \"kind\": \"" << json_escape(r.kind) << "\", \"check\": "
       << (r.has_check ? "true" : "false") << ", \"pass\": "
       << (r.pass ? "true" : "false") << ", \"tolerance\": "
       << fmt17(r.tolerance) << ", \"rule\": \"" << json_escape(r.rule)
       << "\", \"detail\": \"" << json_escape(r.detail) << "\"}";
  }
  os << (rep.results.empty() ? "]" : "\n  ]") << ",\n";
  os << "  \"verdict\": \"" << rep.verdict() << "\"\n}\n";
  return os.str();
}

std::string to_csv(const CertificationReport& rep) {
  std::ostringstream os;
  os << "task,key,value,kind,check,pass,tolerance,rule,detail\n";
  for (const TaskRecord& r : rep.results) {
    os << csv_escape(r.task) << ',' << csv_escape(r.key) << ','
       << fmt17(r.value) << ',' << csv_escape(r.kind) << ','
       << (r.has_check ? "true" : "false") << ','
       << (r.pass ? "true" : "false") << ',' << fmt17(r.tolerance) << ','
       << csv_escape(r.rule) << ',' << csv_escape(r.detail) << '\n';
  }
  return os.str();
}

std::string write_report(const CertificationReport& rep, const Scenario& sc) {
  std::string text = sc.format == "csv" ? to_csv(rep) : to_json(rep);
  if (!sc.out_path.empty()) {
    std::ofstream out(sc.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + sc.out_path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + sc.out_path);
  }
  return text;
}

int exit_code(const CertificationReport& rep) {
  if (rep.had_error) return 1;
  if (!rep.overall_pass) return 2;
  return 0;
}

}  // namespace ptone
