// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/viability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/sampling.hpp"

namespace inclusion_lab {

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::h_ball: return "h_ball";
    case ConstraintKind::affine_h_ball: return "affine_h_ball";
    case ConstraintKind::whole_space: return "whole_space";
    case ConstraintKind::custom: return "custom";
  }
  return "unknown";
}

ConstraintSet ConstraintSet::h_ball(int dim, double radius) {
  require(dim >= 1, "constraint: dim must be positive");
  require(std::isfinite(radius) && radius >= 0.0, "constraint: radius must be finite and >= 0");
  ConstraintSet K;
  K.kind_ = ConstraintKind::h_ball;
  K.center_ = StateVector::Zero(dim);
  K.radius_ = radius;
  return K;
}

ConstraintSet ConstraintSet::affine_h_ball(StateVector center, double radius) {
  require(center.size() >= 1 && center.allFinite(), "constraint: center must be finite and nonempty");
  require(std::isfinite(radius) && radius >= 0.0, "constraint: radius must be finite and >= 0");
  ConstraintSet K;
  K.kind_ = ConstraintKind::affine_h_ball;
  K.center_ = std::move(center);
  K.radius_ = radius;
  return K;
}

ConstraintSet ConstraintSet::whole_space(int dim) {
  require(dim >= 1, "constraint: dim must be positive");
  ConstraintSet K;
  K.kind_ = ConstraintKind::whole_space;
  K.center_ = StateVector::Zero(dim);
  K.radius_ = std::numeric_limits<double>::infinity();
  return K;
}

ConstraintSet ConstraintSet::custom(StateVector center, std::function<double(const StateVector&)> distance) {
  require(center.size() >= 1 && center.allFinite(), "constraint: center must be finite and nonempty");
  require(static_cast<bool>(distance), "constraint: distance oracle required");
  ConstraintSet K;
  K.kind_ = ConstraintKind::custom;
  K.center_ = std::move(center);
  K.custom_distance_ = std::move(distance);
  return K;
}

double ConstraintSet::distance(const StateVector& x) const {
  require(x.size() == center_.size(), "constraint: state has wrong dimension");
  switch (kind_) {
    case ConstraintKind::whole_space: return 0.0;
    case ConstraintKind::custom: {
      const double d = custom_distance_(x);
      require(std::isfinite(d) && d >= 0.0, "constraint: distance oracle must return a finite value >= 0");
      return d;
    }
    default: return std::max(0.0, (x - center_).norm() - radius_);
  }
}

StateVector ConstraintSet::project(const StateVector& x) const {
  if (kind_ == ConstraintKind::whole_space || kind_ == ConstraintKind::custom) return x;
  const StateVector diff = x - center_;
  const double n = diff.norm();
  if (n <= radius_) return x;
  return center_ + (radius_ / n) * diff;
}

std::optional<StateVector> ConstraintSet::outward_normal(const StateVector& x) const {
  if (kind_ != ConstraintKind::h_ball && kind_ != ConstraintKind::affine_h_ball) return std::nullopt;
  const StateVector diff = x - center_;
  const double n = diff.norm();
  if (n == 0.0) return std::nullopt;
  return StateVector(diff / n);
}

PathFunctional negative_indicator(const ConstraintSet& K, double tolerance) {
  return [K, tolerance](int index, const Trajectory& x) -> ExtendedReal {
    return K.contains(x.states.col(index), tolerance) ? -1.0 : 0.0;
  };
}

PathFunctional constant_functional(double c) {
  return [c](int, const Trajectory&) -> ExtendedReal { return c; };
}

std::vector<int> delta_ladder(const TimeGrid& grid, int start_index, int n) {
  require(n >= 1, "delta_ladder: n must be >= 1");
  const double remaining = grid.t_end() - grid.node(start_index);
  const double cap = std::min(1.0 / n, remaining);
  const int m_max = std::min(grid.n_steps() - start_index, static_cast<int>(std::floor(cap / grid.dt() + 1e-9)));
  std::vector<int> rungs;
  for (int m = 1; m <= m_max; m *= 2) rungs.push_back(m);
  if (m_max >= 1 && rungs.back() != m_max) rungs.push_back(m_max);
  return rungs;
}

namespace {

struct Candidate {
  std::string name;
  StateVector b;
};

std::vector<Candidate> fixed_candidates(const Operator& op, const Multifunction& mf, double t, const StateVector& x,
                                        const StateVector* steer_target, int axis_candidates) {
  std::vector<Candidate> out;
  out.push_back({"center", mf.center(t, x)});
  if (steer_target != nullptr) out.push_back({"toward_constraint", mf.support_point(t, x, *steer_target - x)});
  out.push_back({"toward_origin", mf.support_point(t, x, -x)});
  const StateVector ax = op.apply(t, x);
  out.push_back({"hold", mf.project(t, x, ax)});
  out.push_back({"along_operator", mf.support_point(t, x, ax)});
  const int axes = std::min(mf.dim(), std::max(0, axis_candidates));
  for (int k = 0; k < axes; ++k) {
    StateVector e = StateVector::Zero(mf.dim());
    e(k) = 1.0;
    out.push_back({"axis+" + std::to_string(k + 1), mf.support_point(t, x, e)});
    out.push_back({"axis-" + std::to_string(k + 1), mf.support_point(t, x, -e)});
  }
  return out;
}

/// Terminal defect at node `end` of a simulated path; passes when ≤ 0.
using TerminalDefect = std::function<double(int end, int steps, const Trajectory& x)>;

struct SearchSetup {
  const Operator* op;
  const Multifunction* mf;
  const Trajectory* history;
  int index;
  int n;
  const ConstraintSet* K;  // set case only: enables steering and p-correction
  TerminalDefect defect;
  const ViabilityOptions* options;
};

Trajectory simulate(const SearchSetup& s, const StateVector& forcing, int steps) {
  return solve_forced(*s.op, *s.history, s.index, s.index + steps, constant_selector(forcing), s.options->solve);
}

/// Per-mode terminal response to a unit constant forcing held for m semi-implicit steps.
Eigen::VectorXd forcing_response(const Operator& op, double dt, int m) {
  const Eigen::VectorXd& D = op.stiff_diagonal();
  Eigen::VectorXd psi(D.size());
  for (Eigen::Index k = 0; k < D.size(); ++k)
    psi(k) = D(k) > 0.0 ? (1.0 - std::pow(1.0 + dt * D(k), -m)) / D(k) : m * dt;
  return psi;
}

/// Tries to cancel the terminal defect with a constant p, |p| ≤ 1/n.
std::optional<TangencyWitness> correct(const SearchSetup& s, const Candidate& c, int m, const Trajectory& path,
                                       int& simulations) {
  const ConstraintSet& K = *s.K;
  if (K.kind() == ConstraintKind::custom || K.kind() == ConstraintKind::whole_space) return std::nullopt;
  const double cap = 1.0 / s.n;
  const Eigen::VectorXd psi = forcing_response(*s.op, path.grid.dt(), m);
  StateVector p = StateVector::Zero(c.b.size());
  StateVector end = path.states.col(s.index + m);
  for (int it = 0; it < s.options->max_corrections; ++it) {
    const StateVector shift = ((K.project(end) - end).array() / psi.array()).matrix();
    if ((p + shift).norm() > cap * 1.5) return std::nullopt;
    p += shift;
    if (p.norm() > cap) p *= cap / p.norm();
    Trajectory x = simulate(s, c.b + p, m);
    ++simulations;
    end = x.states.col(s.index + m);
    const double d = s.defect(s.index + m, m, x);
    if (d <= 0.0) {
      TangencyWitness w;
      w.steps = m;
      w.delta = m * x.grid.dt();
      w.n = s.n;
      w.b = c.b;
      w.p = p;
      w.x = std::move(x);
      w.candidate = c.name + "+correction";
      w.terminal_defect = K.distance(end);
      return w;
    }
  }
  return std::nullopt;
}

TangencyResult search(const SearchSetup& s, bool report_distance) {
  const TimeGrid& grid = s.history->grid;
  const double t = grid.node(s.index);
  const StateVector x0 = s.history->states.col(s.index);
  TangencyResult result;
  result.best_defect = std::numeric_limits<double>::infinity();

  const std::vector<int> rungs = delta_ladder(grid, s.index, s.n);
  if (rungs.empty()) return result;
  const int m_max = rungs.back();
  const StateVector* steer = s.K ? &s.K->center() : nullptr;
  const std::vector<Candidate> cands = fixed_candidates(*s.op, *s.mf, t, x0, steer, s.options->axis_candidates);

  // One simulation per fixed candidate covers every rung.
  std::vector<Trajectory> paths(cands.size());
  std::vector<std::vector<double>> defects(cands.size(), std::vector<double>(rungs.size()));
  parallel_for(cands.size(), [&](std::size_t c) {
    paths[c] = simulate(s, cands[c].b, m_max);
    for (std::size_t r = 0; r < rungs.size(); ++r) defects[c][r] = s.defect(s.index + rungs[r], rungs[r], paths[c]);
  });
  result.simulations += static_cast<int>(cands.size());

  auto note_best = [&](double d, const std::string& name) {
    if (d < result.best_defect) {
      result.best_defect = d;
      result.best_candidate = name;
    }
  };
  auto make_witness = [&](const Candidate& c, int m, double defect) {
    TangencyWitness w;
    w.steps = m;
    w.delta = m * grid.dt();
    w.n = s.n;
    w.b = c.b;
    w.p = StateVector::Zero(c.b.size());
    w.x = simulate(s, c.b, m);
    w.candidate = c.name;
    w.terminal_defect = defect;
    return w;
  };

  for (std::size_t c = 0; c < cands.size(); ++c)
    for (std::size_t r = 0; r < rungs.size(); ++r) note_best(defects[c][r], cands[c].name);

  for (std::size_t r = rungs.size(); r-- > 0;) {
    const int m = rungs[r];
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (defects[c][r] <= 0.0) {
        result.witness = make_witness(cands[c], m, defects[c][r]);
        ++result.simulations;
        break;
      }
    }
    if (result.witness) break;
    if (s.K != nullptr) {
      const double delta = m * grid.dt();
      const Candidate steer_c{"steer", s.mf->project(t, x0, s.op->apply(t, x0) + (s.K->center() - x0) / delta)};
      Trajectory path = simulate(s, steer_c.b, m);
      ++result.simulations;
      const double d = s.defect(s.index + m, m, path);
      note_best(d, steer_c.name);
      if (d <= 0.0) {
        result.witness = make_witness(steer_c, m, d);
        ++result.simulations;
        break;
      }
      if (s.options->max_corrections > 0) {
        std::vector<const Candidate*> order;
        for (const auto& c : cands) order.push_back(&c);
        order.push_back(&steer_c);
        for (std::size_t c = 0; c < order.size() && !result.witness; ++c) {
          const Trajectory& p = c < cands.size() ? paths[c] : path;
          result.witness = correct(s, *order[c], m, p, result.simulations);
        }
        if (result.witness) break;
      }
    }
  }
  if (result.witness && report_distance && s.K != nullptr)
    result.witness->terminal_defect = s.K->distance(result.witness->x.states.col(s.index + result.witness->steps));
  if (result.witness) {
    result.best_defect = std::min(result.best_defect, result.witness->terminal_defect);
  }
  return result;
}

}  // namespace

TangencyResult tangency_test_set(const ConstraintSet& K, const Operator& op, const Multifunction& mf,
                                 const Trajectory& history, int index, int n, const ViabilityOptions& options) {
  require(K.dim() == op.triple().dim() && mf.dim() == op.triple().dim(), "tangency_test_set: dimension mismatch");
  require(0 <= index && index < history.grid.n_steps(), "tangency_test_set: need t0 < T");
  require(n >= 1, "tangency_test_set: n must be >= 1");
  require(K.contains(history.states.col(index), options.tol_K), "tangency_test_set: x0(t0) is not in K");
  SearchSetup s{&op, &mf, &history, index, n, &K, nullptr, &options};
  s.defect = [&K, &options](int end, int, const Trajectory& x) {
    return K.distance(x.states.col(end)) - options.tol_K;
  };
  TangencyResult r = search(s, true);
  r.best_defect = std::max(0.0, r.best_defect + options.tol_K);
  return r;
}

TangencyResult tangency_test_epi(const PathFunctional& u, const Operator& op, const Multifunction& mf,
                                 const EpigraphPoint& point, int n, const ViabilityOptions& options) {
  require(static_cast<bool>(u), "tangency_test_epi: functional required");
  require(mf.dim() == op.triple().dim(), "tangency_test_epi: dimension mismatch");
  require(0 <= point.index && point.index < point.history.grid.n_steps(), "tangency_test_epi: need t0 < T");
  require(n >= 1, "tangency_test_epi: n must be >= 1");
  const ExtendedReal u0 = u(point.index, point.history);
  require(u0.is_finite() && point.y >= u0.value() - options.tol_u, "tangency_test_epi: point is not in epi u");
  SearchSetup s{&op, &mf, &point.history, point.index, n, nullptr, nullptr, &options};
  const double dt = point.history.grid.dt();
  s.defect = [&u, &point, &options, n, dt](int end, int steps, const Trajectory& x) {
    const ExtendedReal v = u(end, x);
    if (v.is_infinite()) return std::numeric_limits<double>::infinity();
    return v.value() - point.y - steps * dt / n - options.tol_u;
  };
  TangencyResult r = search(s, false);
  if (r.witness) r.witness->terminal_defect += options.tol_u;
  if (std::isfinite(r.best_defect)) r.best_defect += options.tol_u;
  return r;
}

// ---------------------------------------------------------------------------

ViabilityTarget ViabilityTarget::constraint(ConstraintSet K) {
  ViabilityTarget t;
  t.diagnostic_set = K;
  t.set = std::move(K);
  return t;
}

ViabilityTarget ViabilityTarget::epigraph(PathFunctional u) {
  require(static_cast<bool>(u), "ViabilityTarget: functional required");
  ViabilityTarget t;
  t.u = std::move(u);
  return t;
}

ViabilityTarget ViabilityTarget::indicator(const ConstraintSet& K, double tolerance) {
  ViabilityTarget t = epigraph(negative_indicator(K, tolerance));
  t.diagnostic_set = K;
  return t;
}

namespace {

int delta_min_steps(const TimeGrid& grid, const ViabilityOptions& options) {
  if (options.delta_min <= 0.0) return 4;
  return std::max(1, static_cast<int>(std::ceil(options.delta_min / grid.dt() - 1e-9)));
}

void escape_rates(const ViabilityTarget& target, const Operator& op, const Multifunction& mf, const Trajectory& x,
                  int k, int steps, const ViabilityOptions& options, ApproxFailure& failure) {
  failure.observed_escape_rate = std::numeric_limits<double>::quiet_NaN();
  failure.oracle_escape_rate = std::numeric_limits<double>::quiet_NaN();
  if (!target.diagnostic_set || steps < 1) return;
  const StateVector xk = x.states.col(k);
  const auto normal = target.diagnostic_set->outward_normal(xk);
  if (!normal) return;
  const double t = x.grid.node(k);
  failure.oracle_escape_rate = -op.apply(t, xk).dot(*normal) - mf.support(t, xk, -*normal);
  const StateVector* steer = &target.diagnostic_set->center();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : fixed_candidates(op, mf, t, xk, steer, options.axis_candidates)) {
    const Trajectory path = solve_forced(op, x, k, k + steps, constant_selector(c.b), options.solve);
    best = std::min(best, (path.states.col(k + steps) - xk).dot(*normal) / (steps * x.grid.dt()));
  }
  failure.observed_escape_rate = best;
}

}  // namespace

ApproxOutcome build_eps_approximate(const ViabilityTarget& target, const Operator& op, const Multifunction& mf,
                                    const Trajectory& history, int start_index, double y0, double epsilon,
                                    const ViabilityOptions& options) {
  require(epsilon > 0.0 && epsilon <= 1.0, "build_eps_approximate: epsilon must lie in (0, 1]");
  require(target.set.has_value() || static_cast<bool>(target.u), "build_eps_approximate: empty target");
  const TimeGrid& grid = history.grid;
  require(0 <= start_index && start_index < grid.n_steps(), "build_eps_approximate: need t0 < T");
  const int n = static_cast<int>(std::ceil(1.0 / epsilon - 1e-12));
  const int floor_steps = delta_min_steps(grid, options);
  const double t0 = grid.node(start_index);

  Trajectory x = Trajectory::constant(grid, history.states.col(start_index), start_index);
  x.states.leftCols(start_index + 1) = history.states.leftCols(start_index + 1);
  x.forcing.leftCols(start_index) = history.forcing.leftCols(start_index);

  ApproxSolution sol;
  sol.epsilon = epsilon;
  sol.rho.assign(static_cast<std::size_t>(grid.n_steps() + 1), -1);
  sol.f = Eigen::MatrixXd::Zero(history.dim(), grid.n_steps());
  sol.g = Eigen::MatrixXd::Zero(history.dim(), grid.n_steps());

  int k = start_index;
  while (k < grid.n_steps()) {
    x.end_index = k;
    TangencyResult r;
    if (target.set) {
      r = tangency_test_set(*target.set, op, mf, x, k, n, options);
    } else {
      r = tangency_test_epi(target.u, op, mf, EpigraphPoint{x, k, y0 + epsilon * (grid.node(k) - t0)}, n, options);
    }
    const bool reaches_end = r.witness && k + r.witness->steps == grid.n_steps();
    if (!r.witness || (r.witness->steps < floor_steps && !reaches_end)) {
      ApproxFailure failure;
      failure.stuck_index = k;
      failure.stuck_time = grid.node(k);
      failure.stuck_state = x.states.col(k);
      failure.best_defect = r.best_defect;
      failure.best_candidate = r.best_candidate;
      failure.rounds_completed = static_cast<int>(sol.round_starts.size());
      escape_rates(target, op, mf, x, k, std::min(floor_steps, grid.n_steps() - k), options, failure);
      return ApproxOutcome{std::nullopt, failure};
    }
    const TangencyWitness& w = *r.witness;
    sol.round_starts.push_back(k);
    for (int i = k; i < k + w.steps; ++i) {
      x.states.col(i + 1) = w.x.states.col(i + 1);
      sol.f.col(i) = w.b;
      sol.g.col(i) = w.p;
      x.forcing.col(i) = w.b + w.p;
      sol.rho[static_cast<std::size_t>(i)] = k;
    }
    k += w.steps;
  }
  sol.rho[static_cast<std::size_t>(grid.n_steps())] = grid.n_steps();
  x.end_index = grid.n_steps();
  x.fully_implicit = options.solve.fully_implicit;
  x.residual = scheme_residual(op, x);
  sol.tau_index = grid.n_steps();
  sol.tau = grid.t_end();
  sol.x = std::move(x);
  return ApproxOutcome{std::move(sol), std::nullopt};
}

HypothesisReport check_approx_solution(const ViabilityTarget& target, const Operator& op, const Multifunction& mf,
                                       const ApproxSolution& s, int start_index, double y0,
                                       const ViabilityOptions& options) {
  const TimeGrid& grid = s.x.grid;
  const double t0 = grid.node(start_index);
  const double eps = s.epsilon;
  HypothesisReport report;
  report.hypothesis = "approximate_solution";
  auto check = [&](bool ok, const std::string& what, double t) {
    Witness w;
    w.scalars = {{"t", t}};
    report.record(ok ? 0.0 : -1.0, 0.0, w);
    if (!ok) report.notes.push_back(what + " fails at t=" + std::to_string(t));
  };
  check(s.tau > t0 && s.tau <= grid.t_end() + 1e-12, "(i) tau in (t0, T]", s.tau);
  int prev = start_index;
  for (int i = start_index; i <= s.tau_index; ++i) {
    const int r = s.rho[static_cast<std::size_t>(i)];
    const double t = grid.node(i);
    const bool lag = r >= prev && r <= i && grid.node(r) >= t - eps - 1e-12;
    check(lag, "(ii) rho", t);
    prev = r;
  }
  check(s.rho[static_cast<std::size_t>(s.tau_index)] == s.tau_index, "(ii) rho(tau) = tau", s.tau);
  for (int i = s.tau_index; i < grid.n_steps(); ++i)
    check(s.f.col(i).isZero() && s.g.col(i).isZero(), "(iii)/(iv) zero after tau", grid.node(i));
  const Eigen::VectorXd residual = scheme_residual(op, s.x);
  double g_l2 = 0.0;
  for (int i = start_index; i < s.tau_index; ++i) {
    const int r = s.rho[static_cast<std::size_t>(i)];
    check(s.g.col(i).norm() <= eps + 1e-12, "(iv) |g| <= eps", grid.node(i));
    g_l2 += grid.dt() * s.g.col(i).squaredNorm();
    check(mf.distance(grid.node(r), s.x.states.col(r), s.f.col(i)) <= 1e-9, "(v) f in F(rho, x(rho))", grid.node(i));
    check(residual(i) <= 1e-9, "(v) equation residual", grid.node(i));
    const double ti = grid.node(i);
    if (target.set) {
      check(target.set->contains(s.x.states.col(r), options.tol_K), "(vi) x(rho) in K", ti);
    } else {
      const ExtendedReal v = target.u(r, s.x);
      check(v.is_finite() && v.value() <= y0 + eps * (ti - t0) + options.tol_u, "(vi) epigraph bound", ti);
    }
  }
  check(std::sqrt(g_l2) <= eps + 1e-12, "(iv) |g|_L2 <= eps", s.tau);
  if (target.set) {
    check(target.set->contains(s.x.states.col(s.tau_index), options.tol_K), "(vi) x(tau) in K", s.tau);
  } else {
    const ExtendedReal v = target.u(s.tau_index, s.x);
    check(v.is_finite() && v.value() <= y0 + eps * (s.tau - t0) + options.tol_u, "(vi) epigraph bound", s.tau);
  }
  return report;
}

ViableResult viable_trajectory(const ViabilityTarget& target, const Operator& op, const Multifunction& mf,
                               const Trajectory& history, int start_index, double y0, int n_max,
                               const ViabilityOptions& options) {
  require(n_max >= 1, "viable_trajectory: n_max must be >= 1");
  ViableResult result;
  const double T = history.grid.t_end();
  for (int n = 1; n <= n_max; ++n) {
    ApproxOutcome outcome = build_eps_approximate(target, op, mf, history, start_index, y0, 1.0 / n, options);
    if (!outcome.success()) {
      result.failure = outcome.failure;
      result.success = false;
      return result;
    }
    Trajectory& x = outcome.solution->x;
    double worst = 0.0;
    for (int i = start_index; i <= x.grid.n_steps(); ++i) {
      if (target.set) {
        worst = std::max(worst, target.set->distance(x.states.col(i)));
      } else {
        const ExtendedReal v = target.u(i, x);
        worst = std::max(worst, v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value() - y0);
      }
    }
    if (!result.levels.empty()) result.dinf_gaps.push_back(dinf_distance(T, result.x, T, x));
    result.levels.push_back(n);
    result.max_dist.push_back(worst);
    result.x = std::move(x);
  }
  result.success = result.max_dist.back() <= options.tol_K;
  return result;
}

}  // namespace inclusion_lab
