#pragma once

#include <string>
#include <vector>

#include "ptone/scenario.hpp"

namespace ptone {

// One row of a run report. 'kind' classifies the value: a solver outcome
// tag, "lower_bound", "estimate", "check", "invalid", or "error".
// has_check rows carry a verified inequality and drive the verdict.
struct TaskRecord {
  std::string task;
  std::string key;
  double value = 0.0;
  std::string kind;
  bool has_check = false;
  bool pass = true;
  double tolerance = 0.0;
  std::string rule;
  std::string detail;
};

struct CertificationReport {
  std::string scenario;
  std::vector<TaskRecord> results;
  bool overall_pass = true;  // all inequality checks passed
  bool had_error = false;    // some task threw; its row has kind "error"
  std::string verdict() const;
};

// Executes the scenario's tasks. Solves are cached and shared (sharpness
// and sandwich checks reuse the tone), certify checks run last, and a
// failing task is captured as an error row without stopping independent
// tasks.
CertificationReport run_scenario(const Scenario& sc);

std::string to_json(const CertificationReport& rep);
std::string to_csv(const CertificationReport& rep);

// Serializes in the scenario's format, writes to its output path when one
// is set, and returns the text. Identical runs produce identical bytes.
std::string write_report(const CertificationReport& rep, const Scenario& sc);

// 1 on execution error, 2 on a failed inequality, 0 otherwise.
int exit_code(const CertificationReport& rep);

}  // namespace ptone
