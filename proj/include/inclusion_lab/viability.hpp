// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_VIABILITY_HPP
#define INCLUSION_LAB_VIABILITY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "inclusion_lab/extended_real.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/trajectories.hpp"

namespace inclusion_lab {

enum class ConstraintKind { h_ball, affine_h_ball, whole_space, custom };

std::string to_string(ConstraintKind kind);

/// Closed constraint set K ⊂ H described by its distance function.
class ConstraintSet {
 public:
  static ConstraintSet h_ball(int dim, double radius);
  static ConstraintSet affine_h_ball(StateVector center, double radius);
  static ConstraintSet whole_space(int dim);
  /// `distance` must vanish exactly on K; `center` is a point of K used to
  /// steer the tangency search.
  static ConstraintSet custom(StateVector center, std::function<double(const StateVector&)> distance);

  ConstraintKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(center_.size()); }
  const StateVector& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

  double distance(const StateVector& x) const;
  bool contains(const StateVector& x, double tolerance) const { return distance(x) <= tolerance; }
  /// Nearest point of K for balls and H; identity for custom sets.
  StateVector project(const StateVector& x) const;
  /// Outward unit normal of the ball at the point nearest to x; empty when
  /// undefined (x at the center, whole space, custom sets).
  std::optional<StateVector> outward_normal(const StateVector& x) const;

 private:
  ConstraintSet() = default;

  ConstraintKind kind_ = ConstraintKind::whole_space;
  StateVector center_;
  double radius_ = 0.0;
  std::function<double(const StateVector&)> custom_distance_;
};

/// u(t_i, x) for a path functional evaluated at grid node i.
using PathFunctional = std::function<ExtendedReal(int index, const Trajectory& x)>;

/// u(t, x) = -1 if x(t) ∈ K (within `tolerance`), 0 otherwise.
PathFunctional negative_indicator(const ConstraintSet& K, double tolerance = 1e-6);

PathFunctional constant_functional(double c);

struct EpigraphPoint {
  Trajectory history;
  int index = 0;
  double y = 0.0;
};

struct ViabilityOptions {
  double tol_K = 1e-6;
  double tol_u = 1e-8;
  /// Number of coordinate directions ±e_k used as extra candidates.
  int axis_candidates = 8;
  /// Correction iterations for p; 0 disables the correction.
  int max_corrections = 3;
  /// Minimum extension step for approximate solutions; 0 means 4·dt.
  double delta_min = 0.0;
  SolveOptions solve;
};

/// Data (δ, b, p, x) of one quasi-tangency certificate. b and p are
/// constant on [t₀, t₀ + δ]; |p| ≤ 1/n.
struct TangencyWitness {
  double delta = 0.0;
  int steps = 0;
  int n = 1;
  StateVector b;
  StateVector p;
  Trajectory x;
  std::string candidate;
  /// dist(x(t₀+δ), K) in the set case; u(t₀+δ, x) - y₀ - δ/n in the epigraph case.
  double terminal_defect = 0.0;
};

struct TangencyResult {
  std::optional<TangencyWitness> witness;
  /// Smallest terminal defect over all candidates and ladder rungs.
  double best_defect = 0.0;
  std::string best_candidate;
  int simulations = 0;

  bool found() const noexcept { return witness.has_value(); }
};

/// Steps of the δ ladder at (t₀, n): dt·2^j ≤ min(1/n, T - t₀), plus the
/// largest admissible multiple of dt.
std::vector<int> delta_ladder(const TimeGrid& grid, int start_index, int n);

/// Searches a witness of "F(t₀, x₀(t₀)) is A-quasi-tangent to K at (t₀, x₀)".
/// Returns the witness with the largest δ found; an empty result is
/// inconclusive, never a proof of non-tangency. Throws ContractViolation
/// unless x₀(t₀) ∈ K within tol_K.
TangencyResult tangency_test_set(const ConstraintSet& K, const Operator& op, const Multifunction& mf,
                                 const Trajectory& history, int index, int n,
                                 const ViabilityOptions& options = {});

/// Epigraph version: the terminal test is u(t₀+δ, x) ≤ y₀ + δ/n. Throws
/// ContractViolation unless y₀ ≥ u(t₀, x₀) - tol_u.
TangencyResult tangency_test_epi(const PathFunctional& u, const Operator& op, const Multifunction& mf,
                                 const EpigraphPoint& point, int n, const ViabilityOptions& options = {});

/// What an approximate solution must stay in: a set K or the epigraph of u.
struct ViabilityTarget {
  std::optional<ConstraintSet> set;
  PathFunctional u;
  /// Set used for escape-rate diagnostics in the epigraph case.
  std::optional<ConstraintSet> diagnostic_set;

  static ViabilityTarget constraint(ConstraintSet K);
  static ViabilityTarget epigraph(PathFunctional u);
  /// Epigraph of u = -1_K, keeping K for diagnostics.
  static ViabilityTarget indicator(const ConstraintSet& K, double tolerance = 1e-6);
};

/// The quintuple (τ, ϱ, f, g, x). `rho(i)` is the node index of ϱ(t_i) for
/// start ≤ i ≤ τ_index; f and g are zero outside [t₀, τ).
struct ApproxSolution {
  double epsilon = 0.0;
  double tau = 0.0;
  int tau_index = 0;
  std::vector<int> rho;
  Eigen::MatrixXd f;
  Eigen::MatrixXd g;
  Trajectory x;
  /// Node indices where each extension round started.
  std::vector<int> round_starts;
};

struct ApproxFailure {
  int stuck_index = 0;
  double stuck_time = 0.0;
  StateVector stuck_state;
  double best_defect = 0.0;
  std::string best_candidate;
  /// Least outward speed ⟨x(τ+δ) - x(τ), n⟩/δ over the candidates at the
  /// shortest admissible δ, and -⟨A x, n⟩ - σ_F(-n) at the stuck state.
  /// NaN when K has no outward normal there.
  double observed_escape_rate = 0.0;
  double oracle_escape_rate = 0.0;
  int rounds_completed = 0;
};

struct ApproxOutcome {
  std::optional<ApproxSolution> solution;
  std::optional<ApproxFailure> failure;
  bool success() const noexcept { return solution.has_value(); }
};

/// Greedy extension: each round runs the tangency search at the current
/// endpoint with n = ⌈1/ε⌉ and extends by the largest witness δ, which
/// must be ≥ delta_min unless it reaches T. In the epigraph case the round
/// starting at τ_k uses y = y₀ + ε(τ_k - t₀).
ApproxOutcome build_eps_approximate(const ViabilityTarget& target, const Operator& op, const Multifunction& mf,
                                    const Trajectory& history, int start_index, double y0, double epsilon,
                                    const ViabilityOptions& options = {});

/// Checks conditions (i)-(vi) of an ε-approximate solution at grid resolution.
HypothesisReport check_approx_solution(const ViabilityTarget& target, const Operator& op, const Multifunction& mf,
                                       const ApproxSolution& s, int start_index, double y0,
                                       const ViabilityOptions& options = {});

struct ViableResult {
  bool success = false;
  Trajectory x;
  std::vector<int> levels;
  /// sup_t dist(x(t), K) (set case) or sup_t u(t, x) - y₀ (epigraph case) per level.
  std::vector<double> max_dist;
  /// 𝐝_∞(T, x^{(n)}; T, x^{(n+1)}) between consecutive levels.
  std::vector<double> dinf_gaps;
  std::optional<ApproxFailure> failure;
};

/// Builds 1/n-approximate solutions for n = 1..n_max and returns the finest.
ViableResult viable_trajectory(const ViabilityTarget& target, const Operator& op, const Multifunction& mf,
                               const Trajectory& history, int start_index, double y0, int n_max,
                               const ViabilityOptions& options = {});

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_VIABILITY_HPP
