#include "ptone/report.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"

using namespace ptone;

namespace {

const TaskRecord* find_key(const CertificationReport& rep,
                           const std::string& key) {
  for (const auto& r : rep.results)
    if (r.key == key) return &r;
  return nullptr;
}

CertificationReport run_text(const std::string& body) {
  return run_scenario(parse_scenario_text(body, "t"));
}

}  // namespace

TEST_CASE("report on a certified euclidean ball") {
  const char* body =
      "[model]\ndim = 3\ncurvature = 0\n"
      "[params]\np = 2\ngrid = 128\n"
      "[domain]\nkind = ball\nR = 1\n"
      "[tasks]\ntask = tone\ntask = bound:ball_comparison\ntask = certify\n";
  CertificationReport rep = run_text(body);
  CHECK(rep.scenario == "t");
  CHECK(!rep.had_error);
  CHECK(rep.overall_pass);
  CHECK(rep.verdict() == "pass");
  CHECK(exit_code(rep) == 0);

  const TaskRecord* tone = find_key(rep, "tone");
  REQUIRE(tone != nullptr);
  // First-order boundary error at 128 cells sits near 0.8 percent.
  CHECK(tone->value == doctest::Approx(9.869604401089358).epsilon(2e-2));
  CHECK(!tone->has_check);

  const TaskRecord* bound = find_key(rep, "bound.ball_comparison");
  REQUIRE(bound != nullptr);
  CHECK(bound->value == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(bound->kind == "lower_bound");

  const TaskRecord* sandwich = find_key(rep, "check.sandwich.ball_comparison");
  REQUIRE(sandwich != nullptr);
  CHECK(sandwich->has_check);
  CHECK(sandwich->pass);
}

TEST_CASE("report serialization is deterministic") {
  const char* body =
      "[model]\ndim = 2\ncurvature = -1\n"
      "[params]\ngrid = 96\n"
      "[domain]\nkind = ball\nR = 2\n"
      "[tasks]\ntask = tone\n";
  Scenario sc = parse_scenario_text(body, "t");
  CertificationReport a = run_scenario(sc);
  CertificationReport b = run_scenario(sc);
  std::string ja = to_json(a);
  std::string jb = to_json(b);
  CHECK(ja == jb);
  CHECK(ja.find("\"scenario\": \"t\"") != std::string::npos);
  CHECK(ja.find("\"verdict\": \"pass\"") != std::string::npos);
  CHECK(ja.back() == '\n');
  CHECK(ja.find("timestamp") == std::string::npos);

  // CSV carries the same 17-digit value text.
  const TaskRecord* tone = find_key(a, "tone");
  REQUIRE(tone != nullptr);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", tone->value);
  CHECK(ja.find(buf) != std::string::npos);
  CHECK(to_csv(a).find(buf) != std::string::npos);
}

TEST_CASE("invalid bounds do not fail the verdict") {
  const char* body =
      "[model]\ndim = 3\ncurvature = 0\n"
      "[params]\ngrid = 64\n"
      "[domain]\nkind = ball\nR = 1\n"
      "[field]\ntype = constant\nvalue = -1\n"
      "[tasks]\ntask = bound:c_constant\n";
  CertificationReport rep = run_text(body);
  const TaskRecord* bound = find_key(rep, "bound.c_constant");
  REQUIRE(bound != nullptr);
  CHECK(bound->kind == "invalid");
  CHECK(!bound->has_check);
  CHECK(rep.verdict() == "pass");
  CHECK(exit_code(rep) == 0);
}

TEST_CASE("task failures become error rows") {
  // ess_tone without radii cannot run, but parsing is fine.
  const char* body =
      "[model]\ndim = 2\ncurvature = -1\n"
      "[tasks]\ntask = ess_tone\n";
  CertificationReport rep = run_text(body);
  CHECK(rep.had_error);
  CHECK(rep.verdict() == "error");
  CHECK(exit_code(rep) == 1);
  const TaskRecord* err = find_key(rep, "error.ess_tone");
  REQUIRE(err != nullptr);
  CHECK(err->kind == "error");
  CHECK(!err->detail.empty());

  // A canonical field needs a ball; on an annulus the bound task errors
  // while the tone task still completes.
  const char* mixed =
      "[model]\ndim = 3\ncurvature = 0\n"
      "[params]\ngrid = 64\n"
      "[domain]\nkind = annulus\nr0 = 1\nr1 = 2\n"
      "[field]\ntype = canonical_pq\n"
      "[tasks]\ntask = bound:c_constant\ntask = tone\n";
  CertificationReport mix = run_text(mixed);
  CHECK(mix.had_error);
  CHECK(find_key(mix, "error.bound:c_constant") != nullptr);
  const TaskRecord* tone = find_key(mix, "tone");
  REQUIRE(tone != nullptr);
  CHECK(tone->value > 0.0);
  CHECK(exit_code(mix) == 1);
}

TEST_CASE("verdict precedence and tolerance overrides") {
  // An empty task list runs nothing and passes vacuously.
  CertificationReport none = run_text("[model]\ncurvature = -1\n");
  CHECK(none.results.empty());
  CHECK(none.verdict() == "pass");
  CHECK(exit_code(none) == 0);

  // A negative sandwich slack makes any honest bound read as too large.
  const char* body =
      "[model]\ndim = 3\ncurvature = 0\n"
      "[params]\ngrid = 128\n"
      "[domain]\nkind = ball\nR = 1\n"
      "[tasks]\ntask = tone\ntask = bound:ball_comparison\ntask = certify\n"
      "[tolerances]\nbound_slack = -0.9\n";
  CertificationReport rep = run_text(body);
  CHECK(!rep.had_error);
  CHECK(!rep.overall_pass);
  CHECK(rep.verdict() == "fail");
  CHECK(exit_code(rep) == 2);
  const TaskRecord* sandwich = find_key(rep, "check.sandwich.ball_comparison");
  REQUIRE(sandwich != nullptr);
  CHECK(!sandwich->pass);
  CHECK(sandwich->tolerance == -0.9);
}

TEST_CASE("growth tasks emit stable keys") {
  const char* body =
      "[model]\ndim = 2\ncurvature = -1\n"
      "[params]\ngrid = 96\n"
      "[growth]\nr_lo = 10\nr_hi = 30\n"
      "[ess_tone]\nr0 = 1\nR_list = 5, 8, 11\n"
      "[tasks]\ntask = growth\ntask = cheeger\ntask = ess_tone\n"
      "task = certify\n";
  CertificationReport rep = run_text(body);
  CHECK(!rep.had_error);
  REQUIRE(find_key(rep, "theta") != nullptr);
  REQUIRE(find_key(rep, "brooks_bound") != nullptr);
  REQUIRE(find_key(rep, "cheeger_h") != nullptr);
  REQUIRE(find_key(rep, "ess_tone") != nullptr);
  REQUIRE(find_key(rep, "ordering_pass") != nullptr);
  CHECK(find_key(rep, "theta")->value == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(find_key(rep, "brooks_bound")->value ==
        doctest::Approx(0.25).epsilon(2e-2));
  const TaskRecord* ceiling = find_key(rep, "check.brooks_ceiling");
  REQUIRE(ceiling != nullptr);
  CHECK(ceiling->has_check);
  CHECK(ceiling->pass);
  const TaskRecord* ord = find_key(rep, "ordering_pass");
  CHECK(ord->has_check);
  CHECK(ord->pass);
  CHECK(ord->value == 1.0);
}
