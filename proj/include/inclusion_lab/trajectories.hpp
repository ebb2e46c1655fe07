// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_TRAJECTORIES_HPP
#define INCLUSION_LAB_TRAJECTORIES_HPP

#include <functional>
#include <string>
#include <vector>

#include "inclusion_lab/gelfand.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/sampling.hpp"

namespace inclusion_lab {

/// Uniform nodes t_i = t_start + i·dt, i = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, int n_steps);

  /// Grid on [0, horizon] with round(horizon·steps_per_unit) steps (at least 1).
  static TimeGrid uniform(double horizon, int steps_per_unit = 512);

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  int n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return dt_; }
  double node(int i) const noexcept { return i == n_steps_ ? t_end_ : t_start_ + i * dt_; }

  /// Index of the node nearest to t; throws unless t is within 1e-9·dt of it.
  int index_of(double t) const;
  /// Largest i with node(i) ≤ t (clamped to [0, n_steps]).
  int floor_index(double t) const;

  bool operator==(const TimeGrid& other) const noexcept;

 private:
  double t_start_;
  double t_end_;
  int n_steps_;
  double dt_;
};

/// A path on the whole grid. Nodes 0..start_index are the frozen history;
/// the equation x' + A(t,x) = f holds on steps start_index..end_index-1 and
/// the state is held constant after end_index. `forcing.col(i)` is the
/// selector value on [t_i, t_{i+1}), zero outside the active steps, and
/// `residual(i)` is the per-step V*-residual of the scheme.
struct Trajectory {
  TimeGrid grid{0.0, 1.0, 1};
  Eigen::MatrixXd states;
  Eigen::MatrixXd forcing;
  Eigen::VectorXd residual;
  int start_index = 0;
  int end_index = 0;
  bool fully_implicit = false;

  int dim() const noexcept { return static_cast<int>(states.rows()); }
  double t_start() const { return grid.node(start_index); }
  double t_end() const { return grid.node(end_index); }
  StateVector state(int i) const { return states.col(i); }
  StateVector forcing_at(int i) const { return forcing.col(i); }
  StateVector initial_state() const { return states.col(start_index); }
  StateVector final_state() const { return states.col(end_index); }
  /// Piecewise-linear interpolation in time.
  StateVector at(double t) const;
  double max_residual() const;

  /// x ≡ x0 on the whole grid with start = end = start_index.
  static Trajectory constant(const TimeGrid& grid, const StateVector& x0, int start_index = 0);
  /// Wraps a full state matrix (dim × (n+1)) as a trajectory on [start, end].
  static Trajectory from_states(const TimeGrid& grid, Eigen::MatrixXd states, int start_index, int end_index);
};

/// f_i = selector(i, t_i, x_i), evaluated at the left node of each step.
using Selector = std::function<StateVector(int step, double t, const StateVector& x)>;

Selector zero_selector(int dim);
Selector constant_selector(StateVector f);
/// Column i of `values` on step i (absolute step index).
Selector matrix_selector(Eigen::MatrixXd values);

struct SolveOptions {
  bool fully_implicit = false;
  int newton_max_iterations = 50;
  double newton_tolerance = 1e-12;
};

/// Integrates x' + A(t, x) = f on steps [start_index, end_index) from
/// history.state(start_index); nodes up to start_index are copied from
/// `history`.
///
/// Default scheme (semi-implicit Euler, stiff diagonal D implicit):
///   x_{i+1} = (x_i + dt (f_i - N(t_i, x_i))) ./ (1 + dt D)
/// with residual |(x_{i+1}-x_i)/dt + D x_{i+1} + N(t_i,x_i) - f_i|_*.
/// Fully implicit mode solves (x_{i+1}-x_i)/dt + A(t_{i+1},x_{i+1}) = f_i by
/// Newton's method and throws SolverError(step) when it fails to converge.
Trajectory solve_forced(const Operator& op, const Trajectory& history, int start_index, int end_index,
                        const Selector& selector, const SolveOptions& options = {});

/// Scheme residual of a stored path, recomputed from scratch.
Eigen::VectorXd scheme_residual(const Operator& op, const Trajectory& x);

/// Largest dist(f_i, F(t_i, x_i)) over the active steps.
double membership_residual(const Multifunction& mf, const Trajectory& x);

enum class XFStrategy { bang_bang, random_interior, feedback };

std::string to_string(XFStrategy strategy);

struct XFSampleOptions {
  XFStrategy strategy = XFStrategy::random_interior;
  /// Number of switching times for bang_bang / random_interior.
  int switches = 4;
  /// Steering direction for the feedback strategy; default -x. The selector
  /// is the support point of F(t, x) in this direction.
  std::function<StateVector(double t, const StateVector& x)> steering;
  SolveOptions solve;
  double membership_tolerance = 1e-9;
};

/// n trajectories of 𝒳^F(t0, x0) with piecewise-constant selectors.
std::vector<Trajectory> sample_XF(const Operator& op, const Multifunction& mf, const Trajectory& history,
                                  int start_index, int end_index, int n, Rng& rng,
                                  const XFSampleOptions& options = {});

struct WpqSeminorms {
  double lp_v = 0.0;
  double lq_vstar = 0.0;
};

/// Trapezoidal ‖x‖_{L^p(V)} and difference-quotient ‖x'‖_{L^q(V*)} over the
/// active steps.
WpqSeminorms wpq_seminorms(const SpectralTriple& triple, const Trajectory& x);

/// |t2 - t1| + sup_s |x1(s ∧ t1) - x2(s ∧ t2)|, exact for piecewise-linear paths.
double dinf_distance(double t1, const Trajectory& x1, double t2, const Trajectory& x2);

/// Radius c (1 + sup_{t ≤ t0} |x0(t)|) of the forcing ball B_c(t0, x0).
double bc_radius(double c, const Trajectory& history, int start_index);

/// Discrete a-priori bound for fully implicit paths in 𝒳^{B_c}:
/// with b = c(1 + r), K = 2c₃ + 1 and a = r² + Σ dt (2 f^A + b²),
/// the energy E = max|x_i|² + Σ(|Δx|² + 2 dt c₂ ‖x_{i+1}‖^p) obeys E ≤ a (1 - K dt)^{-n}.
struct AprioriBound {
  double energy = 0.0;
  double sup_h = 0.0;
  double lp_v = 0.0;
  double lq_vstar = 0.0;
  double forcing_l2 = 0.0;
  double total() const noexcept { return sup_h + lp_v + lq_vstar + forcing_l2; }
};

AprioriBound apriori_bound(const SpectralTriple& triple, const GrowthCoercivityCertificate& cert, double c,
                           double r, const TimeGrid& grid, int start_index, int end_index);

/// Checks ‖x‖_∞ + ‖x‖_{L^p(V)} + ‖x'‖_{L^q(V*)} + ‖f‖_{L²(H)} ≤ C(c, r) for
/// each trajectory. Paths violating a precondition (history above r,
/// forcing outside B_c, residual of the fully implicit equation above
/// `residual_tolerance`) are listed in the notes and skipped.
HypothesisReport check_apriori(const Operator& op, const GrowthCoercivityCertificate& cert, double c, double r,
                               const std::vector<Trajectory>& trajectories, double residual_tolerance = 1e-9);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_TRAJECTORIES_HPP
