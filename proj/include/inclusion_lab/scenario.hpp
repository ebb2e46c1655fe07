// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_SCENARIO_HPP
#define INCLUSION_LAB_SCENARIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "inclusion_lab/config.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/trajectories.hpp"

namespace inclusion_lab {

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScenarioResult {
  std::string scenario;
  bool pass = false;
  std::vector<Criterion> criteria;
  /// Paths of every file written, report.json last.
  std::vector<std::string> artifacts;
  std::string report_path;
  /// Printed by the front end; never written to artifacts.
  double wall_clock_seconds = 0.0;
};

/// Names accepted by run().
std::vector<std::string> scenario_names();

/// Runs config.scenario and writes its artifacts under config.out (created
/// if missing). report.json is written even when a criterion fails.
/// Throws ConfigError for an unknown or missing scenario name.
ScenarioResult run(const RunConfig& config);

/// CSV with columns t, x_1..x_N, f_1..f_N, residual; the last row carries
/// zero forcing and residual.
void write_trajectory_csv(std::ostream& out, const Trajectory& x);

/// Merges reports of the same hypothesis into one (all margins, worst witness).
HypothesisReport merge_reports(const std::string& hypothesis, const std::vector<HypothesisReport>& reports);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_SCENARIO_HPP
