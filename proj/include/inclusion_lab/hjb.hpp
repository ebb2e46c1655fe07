// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_HJB_HPP
#define INCLUSION_LAB_HJB_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "inclusion_lab/extended_real.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/trajectories.hpp"
#include "inclusion_lab/viability.hpp"

namespace inclusion_lab {

enum class TerminalCostKind { norm_target, indicator_tube, custom };

std::string to_string(TerminalCostKind kind);

/// Terminal cost h : C([0,T], H) → R ∪ {+∞}.
class TerminalCost {
 public:
  /// h(x) = |x(T) - target|.
  static TerminalCost norm_target(StateVector target);
  /// h(x) = 0 if |x(t)| ≤ radius on [0, T], +∞ otherwise.
  static TerminalCost indicator_tube(int dim, double radius, double tolerance = 1e-9);
  static TerminalCost custom(int dim, std::function<ExtendedReal(const Trajectory&)> h);

  TerminalCostKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(target_.size()); }
  const StateVector& target() const noexcept { return target_; }
  double tube_radius() const noexcept { return radius_; }
  double tube_tolerance() const noexcept { return tolerance_; }

  /// Evaluates h on the whole path (nodes 0..n).
  ExtendedReal operator()(const Trajectory& x) const;
  /// True when some node up to `index` leaves the tube (always false for other kinds).
  bool violated(const Trajectory& x, int index) const;

 private:
  TerminalCost() = default;

  TerminalCostKind kind_ = TerminalCostKind::norm_target;
  StateVector target_;
  double radius_ = 0.0;
  double tolerance_ = 0.0;
  std::function<ExtendedReal(const Trajectory&)> custom_;
};

/// Mayer problem: minimize h(x) over x ∈ 𝒳^F(t₀, x₀).
struct MayerProblem {
  OperatorPtr op;
  MultifunctionPtr mf;
  TerminalCost cost;

  const SpectralTriple& triple() const { return op->triple(); }
};

struct ValueGridSpec {
  int time_nodes = 513;
  /// Nodes per state axis; two-mode grids use at most 129.
  int state_nodes = 257;
  /// Extent of each state axis; 0 picks 8 (norm target) or 2·C_K (tube).
  double state_extent = 0.0;
};

/// Dynamic-programming value function on reduced coordinates: r = |x| for
/// radially symmetric problems, or one axis per mode for N ≤ 2. Values are
/// stored for histories that stayed in the tube; the violated layer is +∞
/// for tube costs and equals the stored layer otherwise.
class ValueGrid {
 public:
  enum class Axes { radial, modal };

  Axes axes() const noexcept { return axes_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  int reduced_dim() const noexcept { return reduced_dim_; }
  /// Dimension of the full state.
  int state_dim() const noexcept { return problem_.cost.dim(); }
  /// Value at time node ti and flat state node index.
  const ExtendedReal& at(int ti, int node) const;
  int nodes_per_time() const noexcept { return nodes_per_time_; }

  /// Interpolated v(t, x). A cell with an infinite corner of nonzero weight
  /// evaluates to +∞.
  ExtendedReal value(double t, const StateVector& x, bool violated) const;

  /// u(t_i, x) = v(t_i, x(t_i), violated up to t_i) on a solver grid.
  PathFunctional functional() const;

  /// Control minimizing the next-step value from (t, x): u*·x/|x| in the
  /// radial case, the best discrete control in the modal case.
  StateVector feedback(double t, const StateVector& x) const;

  /// CSV with columns t, r, violated, value (t, x_1, [x_2,] violated, value
  /// for modal grids); "inf" marks the sentinel.
  void write_csv(std::ostream& out) const;

 private:
  friend ValueGrid value_dp(const MayerProblem& problem, const ValueGridSpec& spec);

  ExtendedReal interpolate_state(int ti, const StateVector& reduced) const;
  StateVector reduce(const StateVector& x) const;

  Axes axes_ = Axes::radial;
  MayerProblem problem_{nullptr, nullptr, TerminalCost::norm_target(StateVector::Zero(1))};
  std::vector<double> times_;
  std::vector<double> nodes_;
  int reduced_dim_ = 1;
  int nodes_per_time_ = 0;
  double rate_ = 0.0;  // radial decay rate
  std::vector<ExtendedReal> values_;
};

/// True when value_dp accepts the problem.
bool is_reducible(const MayerProblem& problem, std::string* reason = nullptr);

/// Backward DP with exact per-step flow under constant controls. Throws
/// ContractViolation for non-reducible problems.
ValueGrid value_dp(const MayerProblem& problem, const ValueGridSpec& spec = {});

/// Upper estimate: min of h over sampled trajectories of 𝒳^F(t₀, x₀). The
/// first sample always uses the feedback steering toward the target.
ExtendedReal value_sampled(const MayerProblem& problem, const Trajectory& history, int start_index, int n_controls,
                           std::uint64_t seed, const SolveOptions& solve = {});

struct DppStart {
  Trajectory history;
  int index = 0;
};

/// Dynamic programming principle at the probe times s ≥ t₀: v(t₀, x₀) ≤
/// v(s, x) along sampled trajectories, and equality (within `tolerance`)
/// along the trajectory driven by the DP feedback.
HypothesisReport dpp_check(const MayerProblem& problem, const ValueGrid& v, const std::vector<DppStart>& starts,
                           const std::vector<double>& probe_times, int n_samples, std::uint64_t seed,
                           double tolerance = 1e-3);

/// sup over ε of the minimum difference quotient (u(t₀+δ, x) - u(t₀, x₀))/δ
/// over sampled x with constant selectors in F(t₀, x₀(t₀)) + B(0, ε) and
/// ladder steps with δ ≤ ε. A result ≤ 0 certifies the supersolution
/// inequality at sample resolution; a positive result is inconclusive.
ExtendedReal epiderivative(const PathFunctional& u, const Operator& op, const Multifunction& mf,
                           const Trajectory& history, int index, const std::vector<double>& eps_ladder,
                           const std::vector<int>& delta_steps, int n_samples, std::uint64_t seed,
                           const SolveOptions& solve = {});

/// min over the ladder of (u(t₀-δ, x) - u(t₀, x))/δ along a given path.
ExtendedReal subsolution_residual(const PathFunctional& u, const Trajectory& x, int index,
                                  const std::vector<int>& delta_steps);

using StateFunction = std::function<ExtendedReal(double t, const StateVector& x)>;

/// Checks u₋ ≤ u₊ + tolerance at the given points.
HypothesisReport comparison_check(const StateFunction& u_minus, const StateFunction& u_plus,
                                  const std::vector<std::pair<double, StateVector>>& points,
                                  double tolerance = 1e-9);

enum class TestFunctionKind { affine, quadratic_in_state, time_polynomial, custom };

/// Test function φ(t, x) depending on the path through x(t), with explicit
/// path derivatives ∂_t φ and ∂_x φ.
struct TestFunction {
  TestFunctionKind kind = TestFunctionKind::custom;
  std::function<double(double, const StateVector&)> value;
  std::function<double(double, const StateVector&)> dt;
  std::function<StateVector(double, const StateVector&)> dx;

  /// φ = c + s·t + (b, x).
  static TestFunction affine(StateVector b, double c = 0.0, double time_slope = 0.0);
  /// φ = w |x - a|².
  static TestFunction quadratic_in_state(double w, StateVector a);
  /// φ = Σ_k a_k t^k + inner(t, x).
  static TestFunction time_polynomial(std::vector<double> coefficients, TestFunction inner);
  static TestFunction custom(std::function<double(double, const StateVector&)> value,
                             std::function<double(double, const StateVector&)> dt,
                             std::function<StateVector(double, const StateVector&)> dx);
};

struct ViscosityOptions {
  /// Optional u for the touching spot-check; empty skips it.
  PathFunctional u;
  double touch_tolerance = 1e-9;
  SolveOptions solve;
};

/// -∂_tφ(t₀,x₀) + [min over the ladder and the δ→0 limit of
/// (1/δ)∫⟨A(t,x), ∂_xφ⟩] + σ_F(-∂_xφ(t₀,x₀)), maximized over sampled
/// x ∈ 𝒳^{F(t₀,x₀(t₀)) + B(0,ε)}(t₀, x₀). Throws ContractViolation when
/// the touching spot-check fails.
double viscosity_residual_plus(const TestFunction& phi, const Operator& op, const Multifunction& mf,
                               const Trajectory& history, int index, double eps, const std::vector<int>& delta_steps,
                               int n_samples, std::uint64_t seed, const ViscosityOptions& options = {});

/// ∂_tφ(t₀,x₀) + max over the ladder and the δ→0 limit of
/// (1/δ)∫_{t₀-δ}^{t₀}⟨-A(t,x₀) + f^{x₀}, ∂_xφ⟩ along a recorded path.
double viscosity_residual_minus(const TestFunction& phi, const Operator& op, const Trajectory& x, int index,
                                const std::vector<int>& delta_steps, const ViscosityOptions& options = {});

/// Max minus min over nodes of the cumulative trapezoidal defect of
/// φ(t_i,x) - φ(t_s,x) = ∫ ∂_tφ + ⟨x', ∂_xφ⟩.
double check_testfunction_identity(const TestFunction& phi, const Trajectory& x);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_HJB_HPP
