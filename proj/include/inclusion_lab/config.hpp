// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_CONFIG_HPP
#define INCLUSION_LAB_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inclusion_lab/hjb.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/trajectories.hpp"
#include "inclusion_lab/viability.hpp"

namespace inclusion_lab {

struct TripleSpec {
  int dim = 8;
  /// Explicit eigenvalues; empty means λ_k = k².
  std::vector<double> lambda;
  double p = 2.0;
  double horizon = 1.0;

  SpectralTriple build() const;
};

struct OperatorSpec {
  /// heat | burgers | reaction_diffusion | gain_table
  std::string kind = "heat";
  /// Diffusivity κ (heat) or viscosity ν (burgers).
  double nu = 1.0;
  std::vector<double> reaction;
  std::vector<std::pair<double, double>> custom_table;
  int grid_points = 64;

  OperatorPtr build(const SpectralTriple& triple) const;
};

struct MultifunctionSpec {
  /// centered_ball | affine_ball | polytope
  std::string kind = "centered_ball";
  RadiusLaw radius{1.0, 0.0, 0.0};
  std::vector<double> center_offset;
  double center_gain = 0.0;
  std::vector<std::vector<double>> vertices;
  /// Growth constant; empty derives the smallest constant valid for the
  /// shipped laws.
  std::optional<double> c_F;

  MultifunctionPtr build(int dim) const;
};

struct ConstraintSpec {
  /// h_ball | affine_h_ball | whole_space
  std::string kind = "h_ball";
  std::vector<double> center;
  double radius = 2.0;

  ConstraintSet build(int dim) const;
};

struct CostSpec {
  /// norm_target | indicator_tube
  std::string kind = "norm_target";
  std::vector<double> target;
  double radius = 2.0;
  double tolerance = 1e-9;

  TerminalCost build(int dim) const;
};

struct HistoryKnot {
  double t = 0.0;
  std::vector<double> x;
};

struct StartSpec {
  double t0 = 0.0;
  /// Empty means e₁.
  std::vector<double> x0;
  /// Piecewise-linear history on [0, t0]; empty means x ≡ x0. The last knot
  /// must sit at t0.
  std::vector<HistoryKnot> history;
};

struct GridSettings {
  int steps_per_unit = 512;
  int value_time_nodes = 513;
  int value_state_nodes = 257;
  double state_extent = 0.0;
};

struct ToleranceSettings {
  double hypothesis = 1e-12;
  double tol_K = 1e-6;
  double tol_u = 1e-8;
  double dpp = 1e-3;
};

struct SampleSettings {
  int hypothesis = 1000;
  int fit = 10000;
  int trajectories = 8;
  int controls = 64;
  double radius = 2.0;
};

struct ViabilitySettings {
  int n_max = 6;
  double epsilon = 0.25;
};

/// Fully defaulted run configuration.
struct RunConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string out = "out";
  TripleSpec triple;
  OperatorSpec op;
  MultifunctionSpec mf;
  ConstraintSpec constraint;
  CostSpec cost;
  StartSpec start;
  GridSettings grid;
  ToleranceSettings tolerances;
  SampleSettings samples;
  ViabilitySettings viability;
};

/// Parses a JSON run config. Unknown keys, wrong types and invalid values
/// raise ConfigError naming the field path (e.g. "triple.lambda[2]").
RunConfig parse_config(const std::string& text);

/// Canonical JSON form (every field, defaults included).
std::string dump_config(const RunConfig& config);

/// Names accepted by preset_config.
std::vector<std::string> preset_names();

/// Built-in configurations: heat, burgers, ball, offcenter-ball, radial,
/// example-4-4. Throws ConfigError for unknown names.
RunConfig preset_config(const std::string& name);

/// The solver grid of the config: [0, horizon] at steps_per_unit.
TimeGrid build_grid(const RunConfig& config);

/// History path on the solver grid and the node index of t0.
std::pair<Trajectory, int> build_history(const RunConfig& config, const TimeGrid& grid);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_CONFIG_HPP
