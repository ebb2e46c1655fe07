// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

TimeGrid::TimeGrid(double t_start, double t_end, int n_steps)
    : t_start_(t_start), t_end_(t_end), n_steps_(n_steps), dt_(0.0) {
  require(std::isfinite(t_start) && std::isfinite(t_end), "TimeGrid: endpoints must be finite");
  require(t_end > t_start, "TimeGrid: t_end must exceed t_start");
  require(n_steps >= 1, "TimeGrid: n_steps must be >= 1");
  dt_ = (t_end - t_start) / n_steps;
}

TimeGrid TimeGrid::uniform(double horizon, int steps_per_unit) {
  require(steps_per_unit >= 1, "TimeGrid: steps_per_unit must be >= 1");
  const int n = std::max(1, static_cast<int>(std::lround(horizon * steps_per_unit)));
  return TimeGrid(0.0, horizon, n);
}

int TimeGrid::index_of(double t) const {
  const double s = (t - t_start_) / dt_;
  const long i = std::lround(s);
  require(i >= 0 && i <= n_steps_, "TimeGrid: time outside the grid");
  require(std::abs(s - double(i)) <= 1e-9 * std::max(1.0, std::abs(s)) + 1e-9, "TimeGrid: time is not a grid node");
  return static_cast<int>(i);
}

int TimeGrid::floor_index(double t) const {
  const double s = (t - t_start_) / dt_;
  const double snapped = std::floor(s + 1e-9);
  return static_cast<int>(std::clamp(snapped, 0.0, double(n_steps_)));
}

bool TimeGrid::operator==(const TimeGrid& other) const noexcept {
  return t_start_ == other.t_start_ && t_end_ == other.t_end_ && n_steps_ == other.n_steps_;
}

StateVector Trajectory::at(double t) const {
  const int n = grid.n_steps();
  if (t <= grid.t_start()) return states.col(0);
  if (t >= grid.t_end()) return states.col(n);
  const int i = std::min(grid.floor_index(t), n - 1);
  const double theta = std::clamp((t - grid.node(i)) / grid.dt(), 0.0, 1.0);
  return (1.0 - theta) * states.col(i) + theta * states.col(i + 1);
}

double Trajectory::max_residual() const { return residual.size() == 0 ? 0.0 : residual.maxCoeff(); }

Trajectory Trajectory::constant(const TimeGrid& grid, const StateVector& x0, int start_index) {
  require(x0.allFinite(), "Trajectory: initial state must be finite");
  require(start_index >= 0 && start_index <= grid.n_steps(), "Trajectory: start index outside the grid");
  Trajectory x;
  x.grid = grid;
  x.states = x0.replicate(1, grid.n_steps() + 1);
  x.forcing = Eigen::MatrixXd::Zero(x0.size(), grid.n_steps());
  x.residual = Eigen::VectorXd::Zero(grid.n_steps());
  x.start_index = start_index;
  x.end_index = start_index;
  return x;
}

Trajectory Trajectory::from_states(const TimeGrid& grid, Eigen::MatrixXd states, int start_index, int end_index) {
  require(states.cols() == grid.n_steps() + 1, "Trajectory: need one state per grid node");
  require(states.allFinite(), "Trajectory: states must be finite");
  require(0 <= start_index && start_index <= end_index && end_index <= grid.n_steps(),
          "Trajectory: need 0 <= start <= end <= n_steps");
  Trajectory x;
  x.grid = grid;
  x.forcing = Eigen::MatrixXd::Zero(states.rows(), grid.n_steps());
  x.residual = Eigen::VectorXd::Zero(grid.n_steps());
  x.states = std::move(states);
  x.start_index = start_index;
  x.end_index = end_index;
  return x;
}

Selector zero_selector(int dim) {
  return [dim](int, double, const StateVector&) { return StateVector::Zero(dim); };
}

Selector constant_selector(StateVector f) {
  return [f = std::move(f)](int, double, const StateVector&) { return f; };
}

Selector matrix_selector(Eigen::MatrixXd values) {
  return [values = std::move(values)](int step, double, const StateVector&) -> StateVector {
    require(step >= 0 && step < values.cols(), "matrix_selector: step outside the selector table");
    return values.col(step);
  };
}

namespace {

StateVector newton_step(const Operator& op, double t_next, double dt, const StateVector& x_prev,
                        const StateVector& f, const SolveOptions& options, int step) {
  StateVector x = x_prev;
  for (int it = 0; it < options.newton_max_iterations; ++it) {
    const StateVector g = (x - x_prev) / dt + op.apply(t_next, x) - f;
    const double scale = std::max(1.0, op.triple().vstar_norm(f) + op.triple().vstar_norm(x_prev) / dt);
    if (op.triple().vstar_norm(g) <= options.newton_tolerance * scale) return x;
    Eigen::MatrixXd jac = op.jacobian(t_next, x);
    jac.diagonal().array() += 1.0 / dt;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const StateVector dx = lu.solve(g);
    if (!dx.allFinite()) throw SolverError("Newton iteration produced a non-finite update", step);
    x -= dx;
  }
  throw SolverError("Newton iteration did not converge", step);
}

double step_residual(const Operator& op, const TimeGrid& grid, int i, const StateVector& xi,
                     const StateVector& xn, const StateVector& f, bool fully_implicit) {
  const double dt = grid.dt();
  StateVector r = (xn - xi) / dt - f;
  if (fully_implicit) {
    r += op.apply(grid.node(i + 1), xn);
  } else {
    r += (op.stiff_diagonal().array() * xn.array()).matrix() + op.explicit_part(grid.node(i), xi);
  }
  return op.triple().vstar_norm(r);
}

}  // namespace

Trajectory solve_forced(const Operator& op, const Trajectory& history, int start_index, int end_index,
                        const Selector& selector, const SolveOptions& options) {
  const TimeGrid& grid = history.grid;
  require(history.dim() == op.triple().dim(), "solve_forced: history has wrong dimension");
  require(0 <= start_index && start_index <= end_index && end_index <= grid.n_steps(),
          "solve_forced: need 0 <= start <= end <= n_steps");
  require(static_cast<bool>(selector), "solve_forced: selector required");

  Trajectory x;
  x.grid = grid;
  x.states = history.states;
  x.forcing = Eigen::MatrixXd::Zero(history.dim(), grid.n_steps());
  x.residual = Eigen::VectorXd::Zero(grid.n_steps());
  x.start_index = start_index;
  x.end_index = end_index;
  x.fully_implicit = options.fully_implicit;
  // The equation starts at start_index; earlier forcing is kept for the record.
  x.forcing.leftCols(start_index) = history.forcing.leftCols(start_index);

  const double dt = grid.dt();
  const Eigen::ArrayXd denom = 1.0 + dt * op.stiff_diagonal().array();
  for (int i = start_index; i < end_index; ++i) {
    const StateVector xi = x.states.col(i);
    const StateVector f = selector(i, grid.node(i), xi);
    require(f.size() == xi.size() && f.allFinite(), "solve_forced: selector values must be finite");
    StateVector xn;
    if (options.fully_implicit) {
      xn = newton_step(op, grid.node(i + 1), dt, xi, f, options, i);
    } else {
      xn = ((xi + dt * (f - op.explicit_part(grid.node(i), xi))).array() / denom).matrix();
    }
    if (!xn.allFinite()) throw SolverError("time step produced a non-finite state", i);
    x.states.col(i + 1) = xn;
    x.forcing.col(i) = f;
    x.residual(i) = step_residual(op, grid, i, xi, xn, f, options.fully_implicit);
  }
  for (int i = end_index + 1; i <= grid.n_steps(); ++i) x.states.col(i) = x.states.col(end_index);
  return x;
}

Eigen::VectorXd scheme_residual(const Operator& op, const Trajectory& x) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(x.grid.n_steps());
  for (int i = x.start_index; i < x.end_index; ++i)
    r(i) = step_residual(op, x.grid, i, x.states.col(i), x.states.col(i + 1), x.forcing.col(i), x.fully_implicit);
  return r;
}

double membership_residual(const Multifunction& mf, const Trajectory& x) {
  double worst = 0.0;
  for (int i = x.start_index; i < x.end_index; ++i)
    worst = std::max(worst, mf.distance(x.grid.node(i), x.states.col(i), x.forcing.col(i)));
  return worst;
}

std::string to_string(XFStrategy strategy) {
  switch (strategy) {
    case XFStrategy::bang_bang: return "bang_bang";
    case XFStrategy::random_interior: return "random_interior";
    case XFStrategy::feedback: return "feedback";
  }
  return "unknown";
}

namespace {

/// Piece index of each step for `switches` random switching steps.
std::vector<int> random_pieces(int start, int end, int switches, Rng& rng) {
  std::set<int> cuts;
  for (int k = 0; k < switches && end - start > 1; ++k) cuts.insert(rng.uniform_int(start + 1, end - 1));
  std::vector<int> piece(static_cast<std::size_t>(std::max(0, end - start)));
  int current = 0;
  for (int i = start; i < end; ++i) {
    if (cuts.count(i)) ++current;
    piece[static_cast<std::size_t>(i - start)] = current;
  }
  return piece;
}

StateVector random_coordinates(const Multifunction& mf, Rng& rng) {
  if (mf.kind() == MultifunctionKind::polytope) {
    const auto m = static_cast<int>(mf.vertices().size());
    StateVector w(m);
    for (int i = 0; i < m; ++i) w(i) = -std::log(1.0 - rng.uniform());
    return w / w.sum();
  }
  return sample_h_ball(mf.dim(), 1.0, rng);
}

}  // namespace

std::vector<Trajectory> sample_XF(const Operator& op, const Multifunction& mf, const Trajectory& history,
                                  int start_index, int end_index, int n, Rng& rng,
                                  const XFSampleOptions& options) {
  require(n >= 0, "sample_XF: n must be >= 0");
  require(mf.dim() == op.triple().dim(), "sample_XF: multifunction dimension mismatch");
  require(options.switches >= 0, "sample_XF: switches must be >= 0");
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    Selector selector;
    const std::vector<int> piece = random_pieces(start_index, end_index, options.switches, rng);
    auto piece_of = [piece, start_index](int step) { return piece[static_cast<std::size_t>(step - start_index)]; };
    switch (options.strategy) {
      case XFStrategy::bang_bang: {
        std::vector<int> choice;
        const int n_ext = static_cast<int>(mf.extreme_points(history.t_start(), history.initial_state()).size());
        for (int k = 0; k <= options.switches; ++k) choice.push_back(rng.uniform_int(0, n_ext - 1));
        selector = [&mf, choice, piece_of](int step, double t, const StateVector& x) {
          return mf.extreme_points(t, x)[static_cast<std::size_t>(choice[static_cast<std::size_t>(piece_of(step))])];
        };
        break;
      }
      case XFStrategy::random_interior: {
        std::vector<StateVector> coords;
        for (int k = 0; k <= options.switches; ++k) coords.push_back(random_coordinates(mf, rng));
        selector = [&mf, coords, piece_of](int step, double t, const StateVector& x) {
          return mf.point_from_coordinates(t, x, coords[static_cast<std::size_t>(piece_of(step))]);
        };
        break;
      }
      case XFStrategy::feedback: {
        auto steer = options.steering;
        selector = [&mf, steer](int, double t, const StateVector& x) {
          const StateVector d = steer ? steer(t, x) : StateVector(-x);
          return mf.support_point(t, x, d);
        };
        break;
      }
    }
    Trajectory x = solve_forced(op, history, start_index, end_index, selector, options.solve);
    const double miss = membership_residual(mf, x);
    if (miss > options.membership_tolerance)
      throw Error("sample_XF: selector left F(t, x) by " + std::to_string(miss));
    out.push_back(std::move(x));
  }
  return out;
}

WpqSeminorms wpq_seminorms(const SpectralTriple& triple, const Trajectory& x) {
  require(x.dim() == triple.dim(), "wpq_seminorms: dimension mismatch");
  const double dt = x.grid.dt();
  const double p = triple.p();
  const double q = triple.q();
  WpqSeminorms out;
  double lp = 0.0, lq = 0.0;
  for (int i = x.start_index; i < x.end_index; ++i) {
    const double a = std::pow(triple.v_norm(x.states.col(i)), p);
    const double b = std::pow(triple.v_norm(x.states.col(i + 1)), p);
    lp += 0.5 * dt * (a + b);
    const StateVector slope = (x.states.col(i + 1) - x.states.col(i)) / dt;
    lq += dt * std::pow(triple.vstar_norm(slope), q);
  }
  out.lp_v = std::pow(lp, 1.0 / p);
  out.lq_vstar = std::pow(lq, 1.0 / q);
  return out;
}

double dinf_distance(double t1, const Trajectory& x1, double t2, const Trajectory& x2) {
  require(x1.dim() == x2.dim(), "dinf_distance: dimension mismatch");
  std::vector<double> breaks;
  for (const Trajectory* x : {&x1, &x2})
    for (int i = 0; i <= x->grid.n_steps(); ++i) breaks.push_back(x->grid.node(i));
  breaks.push_back(t1);
  breaks.push_back(t2);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double sup = 0.0;
  for (double s : breaks) sup = std::max(sup, (x1.at(std::min(s, t1)) - x2.at(std::min(s, t2))).norm());
  return std::abs(t2 - t1) + sup;
}

double bc_radius(double c, const Trajectory& history, int start_index) {
  require(c >= 0.0, "bc_radius: c must be >= 0");
  double sup = 0.0;
  for (int i = 0; i <= start_index; ++i) sup = std::max(sup, history.states.col(i).norm());
  return c * (1.0 + sup);
}

AprioriBound apriori_bound(const SpectralTriple& triple, const GrowthCoercivityCertificate& cert, double c,
                           double r, const TimeGrid& grid, int start_index, int end_index) {
  require(c >= 0.0 && r >= 0.0, "apriori_bound: c and r must be >= 0");
  require(cert.c2 > 0.0, "apriori_bound: c2 must be positive");
  const double dt = grid.dt();
  const int n = end_index - start_index;
  const double K = 2.0 * cert.c3 + 1.0;
  require(K * dt < 1.0, "apriori_bound: time step too large for the discrete Gronwall bound");
  const double b = c * (1.0 + r);
  const double length = n * dt;
  double fA_int = 0.0;
  for (int i = start_index; i < end_index; ++i) fA_int += dt * (cert.fA ? cert.fA(grid.node(i + 1)) : 0.0);

  const double p = triple.p();
  const double q = triple.q();
  AprioriBound out;
  const double a = r * r + 2.0 * fA_int + b * b * length;
  out.energy = a * std::pow(1.0 - K * dt, -double(n));
  out.sup_h = std::sqrt(out.energy);
  // Trapezoid vs right-endpoint sum: the left node contributes dt/2 ‖x_start‖^p ≤ dt/2 λ_N^{p/2} r^p.
  const double vsum = out.energy / (2.0 * cert.c2);
  out.lp_v = std::pow(vsum + 0.5 * dt * std::pow(triple.lambda_max(), p / 2.0) * std::pow(r, p), 1.0 / p);
  // x' = f - A(x_{i+1}); split with (a + b)^q ≤ 2^{q-1}(a^q + b^q) twice.
  const double grow = std::pow(1.0 + std::pow(out.sup_h, cert.alpha), q);
  const double two = std::pow(2.0, q - 1.0);
  const double f_part = std::pow(b / std::sqrt(triple.lambda_min()), q) * length;
  const double a_part = grow * two * (fA_int + std::pow(cert.c1, q) * vsum);
  out.lq_vstar = std::pow(two * (f_part + a_part), 1.0 / q);
  out.forcing_l2 = b * std::sqrt(length);
  return out;
}

HypothesisReport check_apriori(const Operator& op, const GrowthCoercivityCertificate& cert, double c, double r,
                               const std::vector<Trajectory>& trajectories, double residual_tolerance) {
  const SpectralTriple& triple = op.triple();
  HypothesisReport report;
  report.hypothesis = "apriori_estimate";
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const Trajectory& x = trajectories[k];
    const std::string tag = "trajectory " + std::to_string(k) + " rejected: ";
    double hist = 0.0;
    for (int i = 0; i <= x.start_index; ++i) hist = std::max(hist, x.states.col(i).norm());
    if (hist > r * (1.0 + 1e-12)) {
      report.notes.push_back(tag + "history exceeds r");
      continue;
    }
    const double b = bc_radius(c, x, x.start_index);
    std::string reason;
    double l2 = 0.0;
    for (int i = x.start_index; i < x.end_index && reason.empty(); ++i) {
      const StateVector f = x.forcing.col(i);
      l2 += x.grid.dt() * f.squaredNorm();
      if (f.norm() > b * (1.0 + 1e-12)) {
        reason = "forcing outside B_c at step " + std::to_string(i);
        break;
      }
      const StateVector xn = x.states.col(i + 1);
      const StateVector ax = op.apply(x.grid.node(i + 1), xn);
      const StateVector res = (xn - x.states.col(i)) / x.grid.dt() + ax - f;
      const double scale = std::max(1.0, triple.vstar_norm(f) + triple.vstar_norm(ax));
      if (triple.vstar_norm(res) > residual_tolerance * scale)
        reason = "fully implicit residual too large at step " + std::to_string(i);
    }
    if (!reason.empty()) {
      report.notes.push_back(tag + reason);
      continue;
    }
    double sup = 0.0;
    for (int i = 0; i <= x.end_index; ++i) sup = std::max(sup, x.states.col(i).norm());
    const WpqSeminorms w = wpq_seminorms(triple, x);
    const double used = sup + w.lp_v + w.lq_vstar + std::sqrt(l2);
    const AprioriBound bound = apriori_bound(triple, cert, c, r, x.grid, x.start_index, x.end_index);
    const double allowed = bound.total();
    const double ratio = allowed > 0.0 ? used / allowed : (used > 0.0 ? INFINITY : 0.0);
    worst_ratio = std::max(worst_ratio, ratio);
    Witness wit;
    wit.scalars = {{"trajectory", double(k)}, {"used", used}, {"allowed", allowed}, {"ratio", ratio},
                   {"sup_h", sup}, {"lp_v", w.lp_v}, {"lq_vstar", w.lq_vstar}, {"forcing_l2", std::sqrt(l2)}};
    report.record(margin_le(used, allowed), 0.0, wit);
  }
  report.notes.push_back("max used/allowed ratio " + std::to_string(worst_ratio));
  return report;
}

}  // namespace inclusion_lab
