// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/hjb.hpp"
#include "inclusion_lab/sampling.hpp"
#include "inclusion_lab/viability.hpp"
#include "json_util.hpp"

namespace inclusion_lab {

using detail::json;

namespace {

std::string fmt(double v) { return ExtendedReal(v).to_string(); }

std::string fmt(const ExtendedReal& v) { return v.to_string(); }

struct Setup {
  SpectralTriple triple;
  OperatorPtr op;
  MultifunctionPtr mf;
  TimeGrid grid;
  Trajectory history;
  int start = 0;
};

Setup make_setup(const RunConfig& c) {
  SpectralTriple triple = c.triple.build();
  OperatorPtr op = c.op.build(triple);
  MultifunctionPtr mf = c.mf.build(triple.dim());
  TimeGrid grid = build_grid(c);
  auto [history, start] = build_history(c, grid);
  return Setup{triple, op, mf, grid, std::move(history), start};
}

class Output {
 public:
  Output(const std::string& dir, ScenarioResult& result) : dir_(dir), result_(result) {
    std::filesystem::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw Error("cannot write " + path(name));
    f << content;
    result_.artifacts.push_back(path(name));
  }

  void write_with(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream s;
    body(s);
    write(name, s.str());
  }

 private:
  std::filesystem::path dir_;
  ScenarioResult& result_;
};

void add(ScenarioResult& r, std::string name, bool pass, std::string detail) {
  r.criteria.push_back(Criterion{std::move(name), pass, std::move(detail)});
}

json extended_or_null(const ExtendedReal& v) { return detail::extended_json(v); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<int> pow2_ladder(int max_steps) {
  std::vector<int> out;
  for (int m = 1; m <= max_steps; m *= 2) out.push_back(m);
  return out;
}

double history_sup(const Trajectory& h, int start) {
  double r = 0.0;
  for (int i = 0; i <= start; ++i) r = std::max(r, h.states.col(i).norm());
  return r;
}

OperatorCertificates certificates_for(const RunConfig& c, const Setup& s) {
  if (c.op.kind == "heat" && c.triple.p == 2.0) return heat_certificates(c.op.nu);
  HypothesisSampler fit(s.triple, c.samples.radius, c.seed ^ 0x5eedf17ULL);
  return fit_certificates(*s.op, fit, c.samples.fit);
}

json certificate_json(const OperatorCertificates& cert) {
  const auto& m = cert.monotonicity;
  const auto& g = cert.growth;
  auto law = [](const PowerLaw& p) { return json{{"coef", p.coef}, {"v_power", p.v_power}, {"h_power", p.h_power}}; };
  return json{{"c0", m.c0},      {"rho", law(m.rho)}, {"eta", law(m.eta)}, {"beta", m.beta},
              {"c1", g.c1},      {"alpha", g.alpha},  {"c2", g.c2},        {"c3", g.c3}};
}

// ---------------------------------------------------------------------------

void scenario_check_hypotheses(const RunConfig& c, const Setup& s, ScenarioResult& r, json& values, Output& out) {
  const OperatorCertificates cert = certificates_for(c, s);
  values["certificates"] = certificate_json(cert);
  values["certificate_source"] = (c.op.kind == "heat" && c.triple.p == 2.0) ? "exact" : "fitted";

  const double tol = c.tolerances.hypothesis;
  std::vector<HypothesisReport> reports;
  {
    HypothesisSampler sampler(s.triple, c.samples.radius, c.seed);
    reports.push_back(check_local_monotonicity(*s.op, cert.monotonicity, sampler, c.samples.hypothesis, tol));
    reports.push_back(check_growth(*s.op, cert.growth, sampler, c.samples.hypothesis, tol));
    reports.push_back(check_coercivity(*s.op, cert.growth, sampler, c.samples.hypothesis, tol));
  }
  {
    HypothesisSampler sampler(s.triple, c.samples.radius, c.seed ^ 0xbe11ULL);
    std::vector<HypothesisReport> hemi;
    for (int i = 0; i < 5; ++i) {
      const SamplePoint p = sampler.next();
      const StateVector v = sample_h_ball(s.triple.dim(), 1.0, sampler.rng());
      hemi.push_back(check_hemicontinuity(*s.op, p.t, p.x, p.y, v, uniform_s_grid(64)));
    }
    reports.push_back(merge_reports(hemi.front().hypothesis, hemi));
  }
  {
    HypothesisSampler sampler(s.triple, c.samples.radius, c.seed ^ 0xf00dULL);
    reports.push_back(check_linear_growth(*s.mf, sampler, c.samples.hypothesis, tol));
    reports.push_back(check_usc(*s.mf, s.grid.node(s.start), s.history.initial_state(),
                                {1.0, 0.5, 0.25, 0.125, 0.0625}, c.seed));
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const HypothesisReport& a, const HypothesisReport& b) { return a.hypothesis < b.hypothesis; });

  json all = json::array();
  for (const auto& rep : reports) {
    all.push_back(detail::to_json(rep));
    add(r, rep.hypothesis, rep.pass, "min_margin=" + fmt(rep.min_margin));
  }
  out.write("hypothesis_report.json", all.dump(2) + "\n");
}

void scenario_simulate(const RunConfig& c, const Setup& s, ScenarioResult& r, json& values, Output& out) {
  Rng rng(c.seed);
  XFSampleOptions opts;
  opts.strategy = XFStrategy::random_interior;
  opts.solve.fully_implicit = true;
  const auto paths = sample_XF(*s.op, *s.mf, s.history, s.start, s.grid.n_steps(), c.samples.trajectories, rng, opts);

  double membership = 0.0;
  double residual = 0.0;
  double forcing = 0.0;
  json seminorms = json::array();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    membership = std::max(membership, membership_residual(*s.mf, paths[i]));
    residual = std::max(residual, paths[i].max_residual());
    for (int k = s.start; k < s.grid.n_steps(); ++k) forcing = std::max(forcing, paths[i].forcing.col(k).norm());
    const WpqSeminorms w = wpq_seminorms(s.triple, paths[i]);
    seminorms.push_back({{"lp_v", w.lp_v}, {"lq_vstar", w.lq_vstar}});
    char name[32];
    std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
    out.write_with(name, [&](std::ostream& o) { write_trajectory_csv(o, paths[i]); });
  }

  const double rad = history_sup(s.history, s.start);
  const double cball = std::max(s.mf->growth_constant(), forcing / (1.0 + rad));
  const OperatorCertificates cert = certificates_for(c, s);
  const HypothesisReport ap = check_apriori(*s.op, cert.growth, cball, rad, paths);

  values["membership_residual"] = membership;
  values["max_scheme_residual"] = residual;
  values["seminorms"] = seminorms;
  values["apriori"] = detail::to_json(ap);
  values["forcing_ball"] = cball;
  add(r, "membership", membership <= 1e-9, "max dist(f, F)=" + fmt(membership));
  add(r, "scheme_residual", residual <= 1e-8, "max residual=" + fmt(residual));
  add(r, "apriori", ap.pass && ap.samples() > 0, "min_margin=" + fmt(ap.min_margin));
}

void scenario_viability(const RunConfig& c, const Setup& s, ScenarioResult& r, json& values, Output& out) {
  const ConstraintSet K = c.constraint.build(s.triple.dim());
  ViabilityOptions opts;
  opts.tol_K = c.tolerances.tol_K;
  opts.tol_u = c.tolerances.tol_u;
  const ViableResult res =
      viable_trajectory(ViabilityTarget::constraint(K), *s.op, *s.mf, s.history, s.start, 0.0, c.viability.n_max, opts);

  values["levels"] = res.levels;
  values["max_dist"] = res.max_dist;
  values["dinf_gaps"] = res.dinf_gaps;
  add(r, "viable", res.success,
      res.success ? "max dist=" + fmt(res.max_dist.back()) : "construction stopped at a stuck endpoint");

  if (res.success) {
    out.write_with("trajectory_viable.csv", [&](std::ostream& o) { write_trajectory_csv(o, res.x); });
    const int last = s.grid.n_steps() - 1;
    int found = 0;
    int probes = 0;
    json probe_json = json::array();
    for (int k = 0; k < 8; ++k) {
      const int node = s.start + (last - s.start) * k / 7;
      const TangencyResult t = tangency_test_set(K, *s.op, *s.mf, res.x, node, c.viability.n_max, opts);
      ++probes;
      if (t.found()) ++found;
      probe_json.push_back({{"t", s.grid.node(node)},
                            {"found", t.found()},
                            {"delta", t.found() ? json(t.witness->delta) : json(nullptr)},
                            {"candidate", t.found() ? json(t.witness->candidate) : json(t.best_candidate)}});
    }
    values["tangency_probes"] = probe_json;
    add(r, "tangency_probes", found == probes, std::to_string(found) + "/" + std::to_string(probes) + " witnesses");
  }
  if (res.failure) {
    const ApproxFailure& f = *res.failure;
    values["failure"] = {{"stuck_time", f.stuck_time},
                         {"stuck_state", detail::vector_json(f.stuck_state)},
                         {"best_defect", finite_or_null(f.best_defect)},
                         {"best_candidate", f.best_candidate},
                         {"observed_escape_rate", finite_or_null(f.observed_escape_rate)},
                         {"oracle_escape_rate", finite_or_null(f.oracle_escape_rate)},
                         {"rounds_completed", f.rounds_completed}};
    const bool comparable = std::isfinite(f.observed_escape_rate) && std::isfinite(f.oracle_escape_rate);
    const double rel = comparable ? std::abs(f.observed_escape_rate - f.oracle_escape_rate) /
                                        std::max(1e-12, std::abs(f.oracle_escape_rate))
                                  : std::numeric_limits<double>::infinity();
    add(r, "escape_rate_oracle", rel <= 0.05,
        comparable ? "observed=" + fmt(f.observed_escape_rate) + " oracle=" + fmt(f.oracle_escape_rate)
                   : "no outward normal at the stuck state");
  }
}

ValueGridSpec grid_spec(const RunConfig& c) {
  return ValueGridSpec{c.grid.value_time_nodes, c.grid.value_state_nodes, c.grid.state_extent};
}

void scenario_value(const RunConfig& c, const Setup& s, ScenarioResult& r, json& values, Output& out) {
  const MayerProblem problem{s.op, s.mf, c.cost.build(s.triple.dim())};
  const ExtendedReal sampled = value_sampled(problem, s.history, s.start, c.samples.controls, c.seed);
  values["value_sampled"] = extended_or_null(sampled);
  std::string reason;
  if (!is_reducible(problem, &reason)) {
    values["value_dp"] = nullptr;
    values["not_reducible"] = reason;
    add(r, "value_dp", false, "not reducible: " + reason);
    return;
  }
  const ValueGrid v = value_dp(problem, grid_spec(c));
  out.write_with("value_grid.csv", [&](std::ostream& o) { v.write_csv(o); });
  const ExtendedReal dp =
      v.value(s.grid.node(s.start), s.history.initial_state(), problem.cost.violated(s.history, s.start));
  values["value_dp"] = extended_or_null(dp);
  bool dominates = true;
  if (dp.is_finite() && sampled.is_finite()) dominates = sampled.value() >= dp.value() - c.tolerances.dpp;
  if (dp.is_infinite()) dominates = sampled.is_infinite();
  add(r, "value_dp", true, "v(t0,x0)=" + fmt(dp));
  add(r, "sampled_dominates_dp", dominates, "sampled=" + fmt(sampled) + " dp=" + fmt(dp));
}

// Affine φ through (t, x, v(t, x)) with slopes from central differences of v.
TestFunction dp_affine(const ValueGrid& v, double t, const StateVector& x, double horizon) {
  const double h = 1e-3;
  const ExtendedReal v0 = v.value(t, x, false);
  require(v0.is_finite(), "dp_affine: value must be finite");
  StateVector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    StateVector e = StateVector::Zero(x.size());
    e(k) = h;
    g(k) = (v.value(t, x + e, false).value() - v.value(t, x - e, false).value()) / (2.0 * h);
  }
  // Second-order stencils on the grid's own time spacing; v is piecewise linear in t.
  const double k = v.times()[1] - v.times()[0];
  auto vt = [&](double tt) { return v.value(tt, x, false).value(); };
  double s = 0.0;
  if (t - k < 0.0) {
    s = (-3.0 * vt(t) + 4.0 * vt(t + k) - vt(t + 2.0 * k)) / (2.0 * k);
  } else if (t + k > horizon) {
    s = (3.0 * vt(t) - 4.0 * vt(t - k) + vt(t - 2.0 * k)) / (2.0 * k);
  } else {
    s = (vt(t + k) - vt(t - k)) / (2.0 * k);
  }
  return TestFunction::affine(g, v0.value() - g.dot(x) - s * t, s);
}

void scenario_hjb_suite(const RunConfig& c, const Setup& s, ScenarioResult& r, json& values, Output& out) {
  const MayerProblem problem{s.op, s.mf, c.cost.build(s.triple.dim())};
  std::string reason;
  if (!is_reducible(problem, &reason)) {
    add(r, "value_dp", false, "not reducible: " + reason);
    return;
  }
  const double tol = c.tolerances.dpp;
  const double T = s.triple.horizon();
  const double t0 = s.grid.node(s.start);
  const int n = s.grid.n_steps();
  const ValueGrid v = value_dp(problem, grid_spec(c));
  out.write_with("value_grid.csv", [&](std::ostream& o) { v.write_csv(o); });
  const PathFunctional u = v.functional();
  const ExtendedReal v0 = u(s.start, s.history);
  values["value_dp"] = extended_or_null(v0);

  std::vector<double> probes;
  for (int k = 0; k <= 8; ++k) probes.push_back(t0 + (T - t0) * k / 8.0);
  const HypothesisReport dpp =
      dpp_check(problem, v, {DppStart{s.history, s.start}}, probes, c.samples.trajectories, c.seed, tol);
  values["dpp"] = detail::to_json(dpp);
  add(r, "dpp", dpp.pass, "min_margin=" + fmt(dpp.min_margin));

  if (v0.is_infinite()) {
    add(r, "start_in_domain", false, "v(t0,x0) is +inf; local residuals skipped");
    return;
  }

  const ExtendedReal epi = epiderivative(u, *s.op, *s.mf, s.history, s.start, {0.02, 0.05, 0.1}, pow2_ladder(n - s.start),
                                         c.samples.controls / 4, c.seed);
  values["epiderivative"] = extended_or_null(epi);
  add(r, "epiderivative", epi.is_finite() && epi.value() <= tol, "estimate=" + fmt(epi));

  Rng rng(c.seed ^ 0x5ab5ULL);
  XFSampleOptions opts;
  const auto paths = sample_XF(*s.op, *s.mf, s.history, s.start, n, c.samples.trajectories, rng, opts);
  const int probe = s.start + 3 * (n - s.start) / 4;
  double worst_sub = -std::numeric_limits<double>::infinity();
  int evaluated = 0;
  for (const Trajectory& x : paths) {
    if (u(probe, x).is_infinite()) continue;
    const ExtendedReal q = subsolution_residual(u, x, probe, pow2_ladder(probe - s.start));
    worst_sub = std::max(worst_sub, q.value_or(std::numeric_limits<double>::infinity()));
    ++evaluated;
  }
  values["subsolution_residual"] = finite_or_null(worst_sub);
  add(r, "subsolution", evaluated > 0 && worst_sub <= tol,
      "max residual=" + (evaluated > 0 ? fmt(worst_sub) : std::string("n/a")) + " over " + std::to_string(evaluated) +
          " paths");

  ValueGridSpec fine = grid_spec(c);
  fine.time_nodes = 2 * fine.time_nodes - 1;
  const ValueGrid vf = value_dp(problem, fine);
  std::vector<std::pair<double, StateVector>> points;
  for (const Trajectory& x : paths) {
    for (int k = 0; k <= 4; ++k) {
      const int i = s.start + (n - s.start) * k / 4;
      if (!problem.cost.violated(x, i)) points.emplace_back(s.grid.node(i), x.state(i));
    }
  }
  const StateFunction coarse = [&v](double t, const StateVector& x) { return v.value(t, x, false); };
  const StateFunction refined = [&vf](double t, const StateVector& x) { return vf.value(t, x, false); };
  const StateFunction shifted = [&v](double t, const StateVector& x) {
    const ExtendedReal a = v.value(t, x, false);
    return a.is_infinite() ? a : ExtendedReal(a.value() - 0.1);
  };
  const HypothesisReport cmp_shift = comparison_check(shifted, coarse, points);
  const HypothesisReport cmp_refine = comparison_check(coarse, refined, points, tol);
  values["comparison_shifted"] = detail::to_json(cmp_shift);
  values["comparison_refined"] = detail::to_json(cmp_refine);
  add(r, "comparison_shifted", cmp_shift.pass, "min_margin=" + fmt(cmp_shift.min_margin));
  add(r, "comparison_refined", cmp_refine.pass, "min_margin=" + fmt(cmp_refine.min_margin));

  ViscosityOptions vopts;
  vopts.u = u;
  vopts.touch_tolerance = 1e-9;
  const TestFunction phi_plus = dp_affine(v, t0, s.history.initial_state(), T);
  // The liminf in δ is probed with the shortest rungs; long rungs add an O(δ) drift.
  const double plus = viscosity_residual_plus(phi_plus, *s.op, *s.mf, s.history, s.start, 0.05,
                                              pow2_ladder(std::min(4, n - s.start)), c.samples.controls / 4, c.seed,
                                              vopts);
  values["viscosity_plus"] = plus;
  add(r, "viscosity_plus", plus >= -tol, "residual=" + fmt(plus));

  const Selector fb = [&v](int, double t, const StateVector& x) { return v.feedback(t, x); };
  const Trajectory opt = solve_forced(*s.op, s.history, s.start, n, fb);
  const int mid = s.start + (n - s.start) / 2;
  const TestFunction phi_minus = dp_affine(v, s.grid.node(mid), opt.state(mid), T);
  const double minus = viscosity_residual_minus(phi_minus, *s.op, opt, mid, pow2_ladder(std::min(4, mid - s.start)), vopts);
  values["viscosity_minus"] = minus;
  add(r, "viscosity_minus", minus >= -tol, "residual=" + fmt(minus));
  out.write_with("trajectory_optimal.csv", [&](std::ostream& o) { write_trajectory_csv(o, opt); });

  const int dim = s.triple.dim();
  const StateVector e1 = s.triple.unit(0);
  const std::vector<std::pair<std::string, TestFunction>> phis = {
      {"affine", TestFunction::affine(e1, 0.5, 0.25)},
      {"quadratic_in_state", TestFunction::quadratic_in_state(1.0, StateVector::Zero(dim))},
      {"time_polynomial", TestFunction::time_polynomial({0.0, 1.0, 0.5}, TestFunction::affine(e1))}};
  json identity = json::object();
  bool identity_ok = true;
  for (const auto& [name, phi] : phis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = s.start; i <= n; ++i) {
      const double p = phi.value(s.grid.node(i), opt.state(i));
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    const double defect = check_testfunction_identity(phi, opt);
    const double bound = 10.0 * s.grid.dt() * (1.0 + hi - lo);
    identity[name] = {{"defect", defect}, {"bound", bound}};
    identity_ok = identity_ok && defect <= bound;
  }
  values["testfunction_identity"] = identity;
  add(r, "testfunction_identity", identity_ok, "three test-function kinds");
}

void scenario_example(const RunConfig& c, const Setup& s, ScenarioResult& r, json& values, Output& out) {
  if (c.cost.kind != "indicator_tube") throw ConfigError("cost.kind", "example-4-4 needs indicator_tube");
  if (s.start == 0) throw ConfigError("start.t0", "example-4-4 needs t0 > 0 for the infeasible history");
  const MayerProblem problem{s.op, s.mf, c.cost.build(s.triple.dim())};
  const double CK = c.cost.radius;
  const ValueGrid v = value_dp(problem, grid_spec(c));
  out.write_with("value_grid.csv", [&](std::ostream& o) { v.write_csv(o); });
  const PathFunctional u = v.functional();
  const int n = s.grid.n_steps();

  // Feasible start.
  const ExtendedReal feasible = u(s.start, s.history);
  const ExtendedReal feasible_sampled = value_sampled(problem, s.history, s.start, c.samples.controls, c.seed);
  values["feasible"] = {{"value_dp", extended_or_null(feasible)}, {"value_sampled", extended_or_null(feasible_sampled)}};
  add(r, "feasible_value_zero", feasible.is_finite() && std::abs(feasible.value()) <= c.tolerances.dpp &&
                                    feasible_sampled == ExtendedReal(0.0),
      "dp=" + fmt(feasible) + " sampled=" + fmt(feasible_sampled));

  ViabilityOptions opts;
  opts.tol_K = c.tolerances.tol_K;
  const ConstraintSet K = ConstraintSet::h_ball(s.triple.dim(), CK);
  const ViableResult viable =
      viable_trajectory(ViabilityTarget::constraint(K), *s.op, *s.mf, s.history, s.start, 0.0, c.viability.n_max, opts);
  values["viable"] = {{"success", viable.success}, {"max_dist", viable.max_dist}};
  if (viable.success) {
    out.write_with("trajectory_feasible.csv", [&](std::ostream& o) { write_trajectory_csv(o, viable.x); });
  }
  const bool cost_zero = viable.success && problem.cost(viable.x) == ExtendedReal(0.0);
  add(r, "viable_trajectory", viable.success && cost_zero,
      viable.success ? "max dist=" + fmt(viable.max_dist.back()) : "construction failed");

  // Infeasible history: starts outside the tube and re-enters by t0.
  const StateVector x0 = s.history.initial_state();
  StateVector outside = s.triple.unit(0);
  if (x0.norm() > 0.0) outside = x0 / x0.norm();
  outside *= CK + 1.0;
  Trajectory bad = Trajectory::constant(s.grid, x0, s.start);
  for (int i = 0; i <= s.start; ++i) {
    const double w = static_cast<double>(i) / s.start;
    bad.states.col(i) = (1.0 - w) * outside + w * x0;
  }
  const ExtendedReal infeasible = u(s.start, bad);
  const ExtendedReal infeasible_sampled = value_sampled(problem, bad, s.start, c.samples.controls, c.seed);
  const Trajectory continuation = solve_forced(*s.op, bad, s.start, n, zero_selector(s.triple.dim()));
  out.write_with("trajectory_infeasible.csv", [&](std::ostream& o) { write_trajectory_csv(o, continuation); });
  int finite_nodes = 0;
  for (int i = s.start; i <= n; ++i) {
    if (u(i, continuation).is_finite()) ++finite_nodes;
  }
  values["infeasible"] = {{"value_dp", extended_or_null(infeasible)},
                          {"value_sampled", extended_or_null(infeasible_sampled)},
                          {"finite_nodes_after_t0", finite_nodes}};
  add(r, "infeasible_value_inf", infeasible.is_infinite() && infeasible_sampled.is_infinite(),
      "dp=" + fmt(infeasible) + " sampled=" + fmt(infeasible_sampled));
  add(r, "no_finite_contamination", finite_nodes == 0, std::to_string(finite_nodes) + " finite nodes after t0");
}

const std::map<std::string, void (*)(const RunConfig&, const Setup&, ScenarioResult&, json&, Output&)>& table() {
  static const std::map<std::string, void (*)(const RunConfig&, const Setup&, ScenarioResult&, json&, Output&)> t = {
      {"check-hypotheses", scenario_check_hypotheses},
      {"simulate", scenario_simulate},
      {"viability", scenario_viability},
      {"value", scenario_value},
      {"hjb-suite", scenario_hjb_suite},
      {"example-4-4", scenario_example},
  };
  return t;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"check-hypotheses", "simulate", "viability", "value", "hjb-suite", "example-4-4"};
}

ScenarioResult run(const RunConfig& config) {
  const auto it = table().find(config.scenario);
  if (it == table().end()) {
    throw ConfigError("scenario", config.scenario.empty() ? "missing" : "unknown scenario '" + config.scenario + "'");
  }
  const auto begin = std::chrono::steady_clock::now();
  ScenarioResult result;
  result.scenario = config.scenario;
  Output out(config.out, result);
  json values = json::object();
  const Setup setup = make_setup(config);
  try {
    it->second(config, setup, result, values, out);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    add(result, "completed", false, e.what());
  }

  result.pass = !result.criteria.empty() &&
                std::all_of(result.criteria.begin(), result.criteria.end(), [](const Criterion& c) { return c.pass; });
  json report;
  report["scenario"] = result.scenario;
  report["seed"] = config.seed;
  report["pass"] = result.pass;
  json crit = json::array();
  for (const auto& c : result.criteria) crit.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  report["criteria"] = crit;
  report["values"] = values;
  json files = json::array();
  for (const auto& a : result.artifacts) files.push_back(std::filesystem::path(a).filename().string());
  files.push_back("report.json");
  report["artifacts"] = files;
  out.write("report.json", report.dump(2) + "\n");
  result.report_path = out.path("report.json");
  result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  return result;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& x) {
  const int dim = x.dim();
  const int n = x.grid.n_steps();
  out << "t";
  for (int k = 1; k <= dim; ++k) out << ",x_" << k;
  for (int k = 1; k <= dim; ++k) out << ",f_" << k;
  out << ",residual\n";
  for (int i = 0; i <= n; ++i) {
    out << fmt(x.grid.node(i));
    for (int k = 0; k < dim; ++k) out << ',' << fmt(x.states(k, i));
    for (int k = 0; k < dim; ++k) out << ',' << fmt(i < n ? x.forcing(k, i) : 0.0);
    out << ',' << fmt(i < n ? x.residual(i) : 0.0) << '\n';
  }
}

HypothesisReport merge_reports(const std::string& hypothesis, const std::vector<HypothesisReport>& reports) {
  HypothesisReport merged;
  merged.hypothesis = hypothesis;
  bool first = true;
  for (const auto& r : reports) {
    merged.pass = merged.pass && r.pass;
    merged.margins.insert(merged.margins.end(), r.margins.begin(), r.margins.end());
    merged.notes.insert(merged.notes.end(), r.notes.begin(), r.notes.end());
    if (!r.margins.empty() && (first || r.min_margin < merged.min_margin)) {
      merged.min_margin = r.min_margin;
      merged.witness = r.witness;
      first = false;
    }
  }
  return merged;
}

}  // namespace inclusion_lab
