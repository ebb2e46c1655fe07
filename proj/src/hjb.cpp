// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/hjb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/sampling.hpp"

namespace inclusion_lab {

std::string to_string(TerminalCostKind kind) {
  switch (kind) {
    case TerminalCostKind::norm_target: return "norm_target";
    case TerminalCostKind::indicator_tube: return "indicator_tube";
    case TerminalCostKind::custom: return "custom";
  }
  return "unknown";
}

TerminalCost TerminalCost::norm_target(StateVector target) {
  require(target.size() >= 1 && target.allFinite(), "terminal cost: target must be finite and nonempty");
  TerminalCost h;
  h.kind_ = TerminalCostKind::norm_target;
  h.target_ = std::move(target);
  return h;
}

TerminalCost TerminalCost::indicator_tube(int dim, double radius, double tolerance) {
  require(dim >= 1, "terminal cost: dim must be positive");
  require(std::isfinite(radius) && radius > 0.0, "terminal cost: tube radius must be finite and positive");
  require(tolerance >= 0.0, "terminal cost: tolerance must be >= 0");
  TerminalCost h;
  h.kind_ = TerminalCostKind::indicator_tube;
  h.target_ = StateVector::Zero(dim);
  h.radius_ = radius;
  h.tolerance_ = tolerance;
  return h;
}

TerminalCost TerminalCost::custom(int dim, std::function<ExtendedReal(const Trajectory&)> fn) {
  require(dim >= 1, "terminal cost: dim must be positive");
  require(static_cast<bool>(fn), "terminal cost: callable required");
  TerminalCost h;
  h.kind_ = TerminalCostKind::custom;
  h.target_ = StateVector::Zero(dim);
  h.custom_ = std::move(fn);
  return h;
}

ExtendedReal TerminalCost::operator()(const Trajectory& x) const {
  require(x.dim() == dim(), "terminal cost: dimension mismatch");
  switch (kind_) {
    case TerminalCostKind::norm_target:
      return (x.states.col(x.grid.n_steps()) - target_).norm();
    case TerminalCostKind::indicator_tube:
      return violated(x, x.grid.n_steps()) ? ExtendedReal::infinity() : ExtendedReal(0.0);
    case TerminalCostKind::custom:
      return custom_(x);
  }
  return ExtendedReal::infinity();
}

bool TerminalCost::violated(const Trajectory& x, int index) const {
  if (kind_ != TerminalCostKind::indicator_tube) return false;
  const int last = std::min(index, x.grid.n_steps());
  for (int i = 0; i <= last; ++i) {
    if (x.states.col(i).norm() > radius_ + tolerance_) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kWeightFloor = 1e-12;
constexpr int kMaxPlanarNodes = 129;

bool isotropic(const Eigen::VectorXd& d) {
  const double hi = d.maxCoeff();
  const double lo = d.minCoeff();
  return hi - lo <= 1e-12 * std::max(1.0, std::abs(hi));
}

// Exact solution of y' = -a y + u after time h.
double modal_flow(double y, double a, double u, double h) {
  if (a == 0.0) return y + u * h;
  const double decay = std::exp(-a * h);
  return y * decay + u * (1.0 - decay) / a;
}

// Radial controls u ∈ {±r_F, ±r_F/2, 0}.
std::vector<double> radial_controls(const RadiusLaw& law, double r) {
  const double rf = law.of_norm(r);
  return {-rf, -0.5 * rf, 0.0, 0.5 * rf, rf};
}

std::vector<StateVector> modal_controls(const Multifunction& mf, double t, const StateVector& x) {
  std::vector<StateVector> out = mf.extreme_points(t, x);
  const StateVector c = mf.center(t, x);
  const std::size_t n_extreme = out.size();
  for (std::size_t i = 0; i < n_extreme; ++i) out.push_back(0.5 * (c + out[i]));
  out.push_back(c);
  // Balls in the plane: a ring of support points, so the best direction is
  // resolved to π/16.
  if (x.size() == 2 && mf.is_ball()) {
    for (int k = 0; k < 16; ++k) {
      const double a = (2.0 * k + 1.0) * M_PI / 16.0;
      StateVector d(2);
      d << std::cos(a), std::sin(a);
      out.push_back(mf.support_point(t, x, d));
    }
  }
  return out;
}

// Linear weight along one axis; j is clamped so that w may leave [0, 1]
// when the coordinate is outside the grid.
void locate(const std::vector<double>& nodes, double y, int& j, double& w) {
  const int m = static_cast<int>(nodes.size());
  const double h = nodes[1] - nodes[0];
  j = static_cast<int>(std::floor((y - nodes[0]) / h));
  j = std::clamp(j, 0, m - 2);
  w = (y - nodes[j]) / h;
}

}  // namespace

const ExtendedReal& ValueGrid::at(int ti, int node) const {
  require(ti >= 0 && ti < static_cast<int>(times_.size()), "value grid: time index out of range");
  require(node >= 0 && node < nodes_per_time_, "value grid: node index out of range");
  return values_[static_cast<std::size_t>(ti) * nodes_per_time_ + node];
}

StateVector ValueGrid::reduce(const StateVector& x) const {
  if (axes_ == Axes::modal) return x;
  StateVector r(1);
  r(0) = x.norm();
  return r;
}

ExtendedReal ValueGrid::interpolate_state(int ti, const StateVector& reduced) const {
  const bool tube = problem_.cost.kind() == TerminalCostKind::indicator_tube;
  const std::size_t base = static_cast<std::size_t>(ti) * nodes_per_time_;
  const int m = static_cast<int>(nodes_.size());

  std::array<int, 2> j{0, 0};
  std::array<double, 2> w{0.0, 0.0};
  for (int a = 0; a < reduced_dim_; ++a) {
    locate(nodes_, reduced(a), j[a], w[a]);
    if (tube && (w[a] < -kWeightFloor || w[a] > 1.0 + kWeightFloor)) return ExtendedReal::infinity();
  }

  const int corners = 1 << reduced_dim_;
  double acc = 0.0;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    int flat = 0;
    int stride = 1;
    for (int a = 0; a < reduced_dim_; ++a) {
      const int bit = (c >> a) & 1;
      weight *= bit ? w[a] : 1.0 - w[a];
      flat += (j[a] + bit) * stride;
      stride *= m;
    }
    const ExtendedReal& v = values_[base + flat];
    if (std::abs(weight) <= kWeightFloor) continue;
    if (v.is_infinite()) return ExtendedReal::infinity();
    acc += weight * v.value();
  }
  return acc;
}

ExtendedReal ValueGrid::value(double t, const StateVector& x, bool violated) const {
  require(x.size() == problem_.cost.dim(), "value grid: dimension mismatch");
  const bool tube = problem_.cost.kind() == TerminalCostKind::indicator_tube;
  if (tube && (violated || x.norm() > problem_.cost.tube_radius() + problem_.cost.tube_tolerance())) {
    return ExtendedReal::infinity();
  }
  const double t0 = times_.front();
  const double t1 = times_.back();
  const double h = times_[1] - times_[0];
  require(t >= t0 - 1e-9 * h && t <= t1 + 1e-9 * h, "value grid: time outside the grid");
  const StateVector red = reduce(x);

  const int n = static_cast<int>(times_.size());
  const double s = std::clamp((t - t0) / h, 0.0, static_cast<double>(n - 1));
  int ti = std::min(static_cast<int>(std::floor(s)), n - 2);
  double w = s - ti;
  if (w <= kWeightFloor) return interpolate_state(ti, red);
  if (w >= 1.0 - kWeightFloor) return interpolate_state(ti + 1, red);
  const ExtendedReal a = interpolate_state(ti, red);
  const ExtendedReal b = interpolate_state(ti + 1, red);
  if (a.is_infinite() || b.is_infinite()) return ExtendedReal::infinity();
  return (1.0 - w) * a.value() + w * b.value();
}

PathFunctional ValueGrid::functional() const {
  auto self = std::make_shared<const ValueGrid>(*this);
  return [self](int index, const Trajectory& x) {
    return self->value(x.grid.node(index), x.state(index), self->problem_.cost.violated(x, index));
  };
}

StateVector ValueGrid::feedback(double t, const StateVector& x) const {
  const int n = static_cast<int>(times_.size());
  const double h = times_[1] - times_[0];
  const int ti = std::clamp(static_cast<int>(std::floor((t - times_.front()) / h + 1e-9)), 0, n - 1);
  const Multifunction& mf = *problem_.mf;
  if (ti == n - 1) return mf.center(t, x);

  const Eigen::VectorXd& d = problem_.op->stiff_diagonal();
  if (axes_ == Axes::radial) {
    const double r = x.norm();
    double best_u = 0.0;
    ExtendedReal best = ExtendedReal::infinity();
    bool any = false;
    for (double u : radial_controls(mf.radius_law(), r)) {
      StateVector next(1);
      next(0) = std::max(0.0, modal_flow(r, rate_, u, h));
      const ExtendedReal v = interpolate_state(ti + 1, next);
      if (!any || v < best) {
        best = v;
        best_u = u;
        any = true;
      }
    }
    if (r <= 1e-14) return StateVector::Zero(x.size());
    return (best_u / r) * x;
  }

  StateVector best_f = mf.center(t, x);
  ExtendedReal best = ExtendedReal::infinity();
  bool any = false;
  for (const StateVector& f : modal_controls(mf, t, x)) {
    StateVector next(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) next(k) = modal_flow(x(k), d(k), f(k), h);
    const ExtendedReal v = interpolate_state(ti + 1, next);
    if (!any || v < best) {
      best = v;
      best_f = f;
      any = true;
    }
  }
  return best_f;
}

void ValueGrid::write_csv(std::ostream& out) const {
  const bool tube = problem_.cost.kind() == TerminalCostKind::indicator_tube;
  const int m = static_cast<int>(nodes_.size());
  out << "t";
  if (axes_ == Axes::radial) {
    out << ",r";
  } else {
    for (int a = 0; a < reduced_dim_; ++a) out << ",x_" << (a + 1);
  }
  out << ",violated,value\n";
  for (std::size_t ti = 0; ti < times_.size(); ++ti) {
    const std::string ts = ExtendedReal(times_[ti]).to_string();
    for (int violated = 0; violated <= 1; ++violated) {
      for (int node = 0; node < nodes_per_time_; ++node) {
        out << ts;
        int rest = node;
        for (int a = 0; a < reduced_dim_; ++a) {
          out << ',' << ExtendedReal(nodes_[rest % m]).to_string();
          rest /= m;
        }
        const ExtendedReal& v = values_[ti * nodes_per_time_ + node];
        out << ',' << violated << ',' << ((tube && violated) ? ExtendedReal::infinity() : v).to_string() << '\n';
      }
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

enum class Reduction { none, radial, modal };

Reduction classify(const MayerProblem& problem, std::string* reason) {
  auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return Reduction::none;
  };
  if (!problem.op || !problem.mf) return fail("operator and multifunction are required");
  const int n = problem.op->triple().dim();
  if (problem.mf->dim() != n || problem.cost.dim() != n) return fail("dimension mismatch");
  if (!problem.op->is_diagonal_linear()) return fail("operator is not diagonal linear");
  if (problem.cost.kind() == TerminalCostKind::custom) return fail("custom terminal costs are not reducible");

  const bool centered = problem.mf->kind() == MultifunctionKind::centered_ball;
  const Eigen::VectorXd& d = problem.op->stiff_diagonal();
  if (centered) {
    if (problem.cost.kind() == TerminalCostKind::indicator_tube) return Reduction::radial;
    if (problem.cost.target().norm() == 0.0 && (n == 1 || isotropic(d))) return Reduction::radial;
  }
  if (n <= 2) return Reduction::modal;
  return fail("no radial symmetry and more than two modes");
}

}  // namespace

bool is_reducible(const MayerProblem& problem, std::string* reason) {
  return classify(problem, reason) != Reduction::none;
}

ValueGrid value_dp(const MayerProblem& problem, const ValueGridSpec& spec) {
  std::string reason;
  const Reduction kind = classify(problem, &reason);
  if (kind == Reduction::none) throw ContractViolation("value_dp: problem not reducible: " + reason);
  require(spec.time_nodes >= 2, "value_dp: need at least two time nodes");
  require(spec.state_nodes >= 3, "value_dp: need at least three state nodes");
  require(spec.state_extent >= 0.0 && std::isfinite(spec.state_extent), "value_dp: extent must be finite");

  const bool tube = problem.cost.kind() == TerminalCostKind::indicator_tube;
  const double tube_r = problem.cost.tube_radius() + problem.cost.tube_tolerance();
  double extent = spec.state_extent;
  if (extent == 0.0) extent = tube ? 2.0 * problem.cost.tube_radius() : 8.0;

  ValueGrid v;
  v.problem_ = problem;
  const double horizon = problem.op->triple().horizon();
  v.times_.resize(static_cast<std::size_t>(spec.time_nodes));
  for (int i = 0; i < spec.time_nodes; ++i) v.times_[i] = horizon * i / (spec.time_nodes - 1);
  v.times_.back() = horizon;
  const double h = horizon / (spec.time_nodes - 1);

  int m = spec.state_nodes;
  if (kind == Reduction::modal && problem.op->triple().dim() == 2) m = std::min(m, kMaxPlanarNodes);
  const Eigen::VectorXd& d = problem.op->stiff_diagonal();
  const Multifunction& mf = *problem.mf;
  v.nodes_.resize(static_cast<std::size_t>(m));

  if (kind == Reduction::radial) {
    v.axes_ = ValueGrid::Axes::radial;
    v.reduced_dim_ = 1;
    // Slowest decay: the tube problem only asks for feasibility, and the
    // norm problem reaches here with an isotropic diagonal.
    v.rate_ = d.minCoeff();
    for (int j = 0; j < m; ++j) v.nodes_[j] = extent * j / (m - 1);
    v.nodes_per_time_ = m;
  } else {
    v.axes_ = ValueGrid::Axes::modal;
    v.reduced_dim_ = problem.op->triple().dim();
    for (int j = 0; j < m; ++j) v.nodes_[j] = -extent + 2.0 * extent * j / (m - 1);
    v.nodes_per_time_ = v.reduced_dim_ == 1 ? m : m * m;
  }

  const int per = v.nodes_per_time_;
  const int dim = v.reduced_dim_;
  v.values_.assign(static_cast<std::size_t>(spec.time_nodes) * per, ExtendedReal(0.0));

  auto node_state = [&](int node) {
    StateVector y(dim);
    int rest = node;
    for (int a = 0; a < dim; ++a) {
      y(a) = v.nodes_[rest % m];
      rest /= m;
    }
    return y;
  };
  // Full state used to evaluate the multifunction at a reduced node.
  auto full_state = [&](const StateVector& y) {
    if (kind == Reduction::modal) return y;
    StateVector x = StateVector::Zero(problem.cost.dim());
    x(0) = y(0);
    return x;
  };

  const int last = spec.time_nodes - 1;
  for (int node = 0; node < per; ++node) {
    const StateVector y = node_state(node);
    ExtendedReal terminal;
    if (tube) {
      terminal = y.norm() > tube_r ? ExtendedReal::infinity() : ExtendedReal(0.0);
    } else if (kind == Reduction::radial) {
      terminal = y(0);
    } else {
      terminal = (y - problem.cost.target()).norm();
    }
    v.values_[static_cast<std::size_t>(last) * per + node] = terminal;
  }

  for (int ti = last - 1; ti >= 0; --ti) {
    const double t = v.times_[ti];
    parallel_for(static_cast<std::size_t>(per), [&](std::size_t idx) {
      const int node = static_cast<int>(idx);
      const StateVector y = node_state(node);
      ExtendedReal best = ExtendedReal::infinity();
      if (!(tube && y.norm() > tube_r)) {
        if (kind == Reduction::radial) {
          for (double u : radial_controls(mf.radius_law(), y(0))) {
            StateVector next(1);
            next(0) = std::max(0.0, modal_flow(y(0), v.rate_, u, h));
            best = min(best, v.interpolate_state(ti + 1, next));
          }
        } else {
          const StateVector x = full_state(y);
          for (const StateVector& f : modal_controls(mf, t, x)) {
            StateVector next(dim);
            for (int k = 0; k < dim; ++k) next(k) = modal_flow(y(k), d(k), f(k), h);
            best = min(best, v.interpolate_state(ti + 1, next));
          }
        }
      }
      v.values_[static_cast<std::size_t>(ti) * per + node] = best;
    });
  }
  return v;
}

// ---------------------------------------------------------------------------

ExtendedReal value_sampled(const MayerProblem& problem, const Trajectory& history, int start_index, int n_controls,
                           std::uint64_t seed, const SolveOptions& solve) {
  require(problem.op && problem.mf, "value_sampled: operator and multifunction are required");
  require(n_controls >= 1, "value_sampled: need at least one control");
  const int end = history.grid.n_steps();
  Rng rng(seed);

  XFSampleOptions steer;
  steer.strategy = XFStrategy::feedback;
  steer.solve = solve;
  const StateVector target = problem.cost.target();
  steer.steering = [target](double, const StateVector& x) -> StateVector { return target - x; };
  ExtendedReal best = problem.cost(sample_XF(*problem.op, *problem.mf, history, start_index, end, 1, rng, steer)[0]);

  for (int i = 1; i < n_controls; ++i) {
    XFSampleOptions opts;
    opts.strategy = (i % 2 == 0) ? XFStrategy::bang_bang : XFStrategy::random_interior;
    opts.solve = solve;
    const Trajectory x = sample_XF(*problem.op, *problem.mf, history, start_index, end, 1, rng, opts)[0];
    best = min(best, problem.cost(x));
  }
  return best;
}

HypothesisReport dpp_check(const MayerProblem& problem, const ValueGrid& v, const std::vector<DppStart>& starts,
                           const std::vector<double>& probe_times, int n_samples, std::uint64_t seed,
                           double tolerance) {
  require(!starts.empty(), "dpp_check: need at least one start");
  require(n_samples >= 0, "dpp_check: n_samples must be >= 0");
  HypothesisReport report;
  report.hypothesis = "dynamic_programming";
  Rng rng(seed);

  auto margin_of = [](const ExtendedReal& lhs, const ExtendedReal& rhs) {
    // lhs ≥ rhs in R ∪ {+∞}
    if (lhs.is_infinite()) return 1.0;
    if (rhs.is_infinite()) return -1.0;
    return margin_ge(lhs.value(), rhs.value());
  };

  for (std::size_t si = 0; si < starts.size(); ++si) {
    const DppStart& st = starts[si];
    const Trajectory& hist = st.history;
    const int end = hist.grid.n_steps();
    const double t0 = hist.grid.node(st.index);
    const ExtendedReal v0 = v.value(t0, hist.state(st.index), problem.cost.violated(hist, st.index));

    std::vector<Trajectory> paths;
    const Selector fb = [&v](int, double t, const StateVector& x) { return v.feedback(t, x); };
    paths.push_back(solve_forced(*problem.op, hist, st.index, end, fb));
    if (n_samples > 0) {
      XFSampleOptions opts;
      opts.strategy = XFStrategy::random_interior;
      auto extra = sample_XF(*problem.op, *problem.mf, hist, st.index, end, n_samples, rng, opts);
      paths.insert(paths.end(), extra.begin(), extra.end());
    }

    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
      const Trajectory& x = paths[pi];
      for (double s : probe_times) {
        if (s < t0) continue;
        const int idx = x.grid.floor_index(s + 1e-9 * x.grid.dt());
        const ExtendedReal vs = v.value(x.grid.node(idx), x.state(idx), problem.cost.violated(x, idx));
        Witness w;
        w.scalars = {{"start", static_cast<double>(si)}, {"path", static_cast<double>(pi)}, {"t0", t0},
                     {"s", x.grid.node(idx)}, {"v0", v0.value_or(std::numeric_limits<double>::infinity())},
                     {"vs", vs.value_or(std::numeric_limits<double>::infinity())}};
        report.record(margin_of(vs, v0), tolerance, w);
        // The feedback path realizes the infimum.
        if (pi == 0) report.record(margin_of(v0, vs), tolerance, w);
      }
    }
  }
  if (report.samples() == 0) report.notes.push_back("no probe time at or after any start");
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Constant forcings in F(t₀, x₀) + B(0, ε): center, the support point
// toward the origin, extreme points pushed outward by ε, and random points.
std::vector<StateVector> inflated_forcings(const Multifunction& mf, double t, const StateVector& x, double eps,
                                           int n_random, Rng& rng) {
  std::vector<StateVector> out;
  const StateVector c = mf.center(t, x);
  out.push_back(c);
  if (x.norm() > 0.0) out.push_back(mf.support_point(t, x, -x));
  for (const StateVector& e : mf.extreme_points(t, x)) {
    out.push_back(e);
    const StateVector dir = e - c;
    const double n = dir.norm();
    if (n > 0.0 && eps > 0.0) out.push_back(e + (eps / n) * dir);
  }
  const int dim = static_cast<int>(x.size());
  const int nv = static_cast<int>(mf.vertices().size());
  for (int i = 0; i < n_random; ++i) {
    StateVector w;
    if (mf.kind() == MultifunctionKind::polytope) {
      w.resize(nv);
      for (int k = 0; k < nv; ++k) w(k) = -std::log(1.0 - rng.uniform());
      w /= w.sum();
    } else {
      w = sample_h_ball(dim, 1.0, rng);
    }
    StateVector f = mf.point_from_coordinates(t, x, w);
    if (eps > 0.0) f += sample_h_ball(dim, eps, rng);
    out.push_back(std::move(f));
  }
  return out;
}

// Forward rungs stop at T; backward rungs stop at `floor`, the first node
// where the path solves the inclusion.
std::vector<int> admissible_rungs(const std::vector<int>& steps, const TimeGrid& grid, int index, double max_delta,
                                  bool forward, int floor = 0) {
  std::vector<int> out;
  for (int m : steps) {
    if (m < 1) continue;
    if (forward ? index + m > grid.n_steps() : index - m < floor) continue;
    if (m * grid.dt() > max_delta * (1.0 + 1e-12)) continue;
    out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Trajectory> simulate_all(const Operator& op, const Trajectory& history, int index, int steps,
                                     const std::vector<StateVector>& forcings, const SolveOptions& solve) {
  std::vector<Trajectory> paths(forcings.size());
  parallel_for(forcings.size(), [&](std::size_t i) {
    paths[i] = solve_forced(op, history, index, index + steps, constant_selector(forcings[i]), solve);
  });
  return paths;
}

void check_touch(const PathFunctional& u, const TestFunction& phi, const Trajectory& x, int index, double tol) {
  if (!u) return;
  const ExtendedReal uv = u(index, x);
  const double pv = phi.value(x.grid.node(index), x.state(index));
  if (uv.is_infinite() || std::abs(uv.value() - pv) > tol) {
    throw ContractViolation("viscosity residual: test function does not touch u at the base point");
  }
}

}  // namespace

ExtendedReal epiderivative(const PathFunctional& u, const Operator& op, const Multifunction& mf,
                           const Trajectory& history, int index, const std::vector<double>& eps_ladder,
                           const std::vector<int>& delta_steps, int n_samples, std::uint64_t seed,
                           const SolveOptions& solve) {
  require(static_cast<bool>(u), "epiderivative: functional required");
  require(index >= 0 && index < history.grid.n_steps(), "epiderivative: index must precede the horizon");
  require(n_samples >= 0, "epiderivative: n_samples must be >= 0");
  const ExtendedReal u0 = u(index, history);
  require(u0.is_finite(), "epiderivative: u must be finite at the base point");
  const double t0 = history.grid.node(index);
  const StateVector x0 = history.state(index);
  const double dt = history.grid.dt();
  Rng rng(seed);

  std::optional<ExtendedReal> sup;
  for (double eps : eps_ladder) {
    require(eps > 0.0, "epiderivative: eps must be positive");
    const auto rungs = admissible_rungs(delta_steps, history.grid, index, eps, true);
    if (rungs.empty()) continue;
    const auto forcings = inflated_forcings(mf, t0, x0, eps, n_samples, rng);
    const auto paths = simulate_all(op, history, index, rungs.back(), forcings, solve);
    ExtendedReal inf = ExtendedReal::infinity();
    for (const Trajectory& x : paths) {
      for (int m : rungs) inf = min(inf, difference_quotient(u(index + m, x), u0, m * dt));
    }
    sup = sup ? max(*sup, inf) : inf;
  }
  if (!sup) throw ContractViolation("epiderivative: no ladder step fits under any eps");
  return *sup;
}

ExtendedReal subsolution_residual(const PathFunctional& u, const Trajectory& x, int index,
                                  const std::vector<int>& delta_steps) {
  require(static_cast<bool>(u), "subsolution_residual: functional required");
  const ExtendedReal u0 = u(index, x);
  require(u0.is_finite(), "subsolution_residual: u must be finite at the base point");
  const auto rungs =
      admissible_rungs(delta_steps, x.grid, index, std::numeric_limits<double>::infinity(), false, x.start_index);
  require(!rungs.empty(), "subsolution_residual: no ladder step fits after the path start");
  ExtendedReal out = ExtendedReal::infinity();
  for (int m : rungs) out = min(out, difference_quotient(u(index - m, x), u0, m * x.grid.dt()));
  return out;
}

HypothesisReport comparison_check(const StateFunction& u_minus, const StateFunction& u_plus,
                                  const std::vector<std::pair<double, StateVector>>& points, double tolerance) {
  require(u_minus && u_plus, "comparison_check: both functions required");
  HypothesisReport report;
  report.hypothesis = "comparison";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [t, x] = points[i];
    const ExtendedReal lo = u_minus(t, x);
    const ExtendedReal hi = u_plus(t, x);
    double margin = 1.0;
    if (hi.is_finite()) margin = lo.is_infinite() ? -1.0 : margin_le(lo.value(), hi.value());
    Witness w;
    w.scalars = {{"point", static_cast<double>(i)}, {"t", t},
                 {"u_minus", lo.value_or(std::numeric_limits<double>::infinity())},
                 {"u_plus", hi.value_or(std::numeric_limits<double>::infinity())}};
    w.vectors["x"] = std::vector<double>(x.data(), x.data() + x.size());
    report.record(margin, tolerance, w);
  }
  return report;
}

// ---------------------------------------------------------------------------

TestFunction TestFunction::affine(StateVector b, double c, double time_slope) {
  TestFunction phi;
  phi.kind = TestFunctionKind::affine;
  phi.value = [b, c, time_slope](double t, const StateVector& x) { return c + time_slope * t + b.dot(x); };
  phi.dt = [time_slope](double, const StateVector&) { return time_slope; };
  phi.dx = [b](double, const StateVector&) { return b; };
  return phi;
}

TestFunction TestFunction::quadratic_in_state(double w, StateVector a) {
  TestFunction phi;
  phi.kind = TestFunctionKind::quadratic_in_state;
  phi.value = [w, a](double, const StateVector& x) { return w * (x - a).squaredNorm(); };
  phi.dt = [](double, const StateVector&) { return 0.0; };
  phi.dx = [w, a](double, const StateVector& x) -> StateVector { return 2.0 * w * (x - a); };
  return phi;
}

TestFunction TestFunction::time_polynomial(std::vector<double> coefficients, TestFunction inner) {
  TestFunction phi;
  phi.kind = TestFunctionKind::time_polynomial;
  phi.value = [coefficients, inner](double t, const StateVector& x) {
    double p = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) p = p * t + *it;
    return p + inner.value(t, x);
  };
  phi.dt = [coefficients, inner](double t, const StateVector& x) {
    double p = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 1;) p = p * t + static_cast<double>(k) * coefficients[k];
    return p + inner.dt(t, x);
  };
  phi.dx = inner.dx;
  return phi;
}

TestFunction TestFunction::custom(std::function<double(double, const StateVector&)> value,
                                  std::function<double(double, const StateVector&)> dt,
                                  std::function<StateVector(double, const StateVector&)> dx) {
  require(value && dt && dx, "test function: value and both derivatives required");
  TestFunction phi;
  phi.kind = TestFunctionKind::custom;
  phi.value = std::move(value);
  phi.dt = std::move(dt);
  phi.dx = std::move(dx);
  return phi;
}

double viscosity_residual_plus(const TestFunction& phi, const Operator& op, const Multifunction& mf,
                               const Trajectory& history, int index, double eps, const std::vector<int>& delta_steps,
                               int n_samples, std::uint64_t seed, const ViscosityOptions& options) {
  require(index >= 0 && index < history.grid.n_steps(), "viscosity residual: index must precede the horizon");
  require(eps >= 0.0, "viscosity residual: eps must be >= 0");
  check_touch(options.u, phi, history, index, options.touch_tolerance);

  const TimeGrid& grid = history.grid;
  const double t0 = grid.node(index);
  const StateVector x0 = history.state(index);
  const StateVector g0 = phi.dx(t0, x0);
  const double limit = op.apply(t0, x0).dot(g0);
  const double base = -phi.dt(t0, x0) + mf.support(t0, x0, -g0);

  const auto rungs = admissible_rungs(delta_steps, grid, index, std::numeric_limits<double>::infinity(), true);
  if (rungs.empty()) return base + limit;

  Rng rng(seed);
  const auto forcings = inflated_forcings(mf, t0, x0, eps, n_samples, rng);
  const auto paths = simulate_all(op, history, index, rungs.back(), forcings, options.solve);
  const double dt = grid.dt();

  double worst = -std::numeric_limits<double>::infinity();
  for (const Trajectory& x : paths) {
    auto integrand = [&](int i) {
      const double t = grid.node(i);
      return op.apply(t, x.state(i)).dot(phi.dx(t, x.state(i)));
    };
    double best = limit;
    double integral = 0.0;
    double prev = integrand(index);
    std::size_t r = 0;
    for (int m = 1; m <= rungs.back(); ++m) {
      const double cur = integrand(index + m);
      integral += 0.5 * dt * (prev + cur);
      prev = cur;
      if (m == rungs[r]) {
        best = std::min(best, integral / (m * dt));
        ++r;
      }
    }
    worst = std::max(worst, best);
  }
  return base + worst;
}

double viscosity_residual_minus(const TestFunction& phi, const Operator& op, const Trajectory& x, int index,
                                const std::vector<int>& delta_steps, const ViscosityOptions& options) {
  require(index >= 1 && index <= x.grid.n_steps(), "viscosity residual: need a step before t0");
  check_touch(options.u, phi, x, index, options.touch_tolerance);
  const TimeGrid& grid = x.grid;
  const double t0 = grid.node(index);
  const StateVector x0 = x.state(index);
  const StateVector f_left = x.forcing_at(index - 1);
  double best = (f_left - op.apply(t0, x0)).dot(phi.dx(t0, x0));

  const auto rungs =
      admissible_rungs(delta_steps, grid, index, std::numeric_limits<double>::infinity(), false, x.start_index);
  const double dt = grid.dt();
  double integral = 0.0;
  std::size_t r = 0;
  const int top = rungs.empty() ? 0 : rungs.back();
  for (int m = 1; m <= top; ++m) {
    // Step [t_{index-m}, t_{index-m+1}) with its constant forcing.
    const int i = index - m;
    const StateVector f = x.forcing_at(i);
    auto term = [&](int j) {
      const double t = grid.node(j);
      return (f - op.apply(t, x.state(j))).dot(phi.dx(t, x.state(j)));
    };
    integral += 0.5 * dt * (term(i) + term(i + 1));
    if (m == rungs[r]) {
      best = std::max(best, integral / (m * dt));
      ++r;
    }
  }
  return phi.dt(t0, x0) + best;
}

double check_testfunction_identity(const TestFunction& phi, const Trajectory& x) {
  const TimeGrid& grid = x.grid;
  const int s = x.start_index;
  const double dt = grid.dt();
  const double phi0 = phi.value(grid.node(s), x.state(s));
  double integral = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  for (int i = s; i < x.end_index; ++i) {
    const double ta = grid.node(i);
    const double tb = grid.node(i + 1);
    const StateVector xa = x.state(i);
    const StateVector xb = x.state(i + 1);
    const StateVector vel = (xb - xa) / dt;
    integral += 0.5 * dt * (phi.dt(ta, xa) + vel.dot(phi.dx(ta, xa)) + phi.dt(tb, xb) + vel.dot(phi.dx(tb, xb)));
    const double defect = phi.value(tb, xb) - phi0 - integral;
    lo = std::min(lo, defect);
    hi = std::max(hi, defect);
  }
  return hi - lo;
}

}  // namespace inclusion_lab
