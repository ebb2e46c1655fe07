// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>

#include "inclusion_lab/errors.hpp"
#include "json_util.hpp"

namespace inclusion_lab {

using detail::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(join(path, key), "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v <= 0.0) throw ConfigError(path, "must be positive");
  return v;
}

double nonnegative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v < 0.0) throw ConfigError(path, "must be >= 0");
  return v;
}

int integer(const json& j, const std::string& path, int lo) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > 100000000) throw ConfigError(path, "must be in [" + std::to_string(lo) + ", 1e8]");
  return static_cast<int>(v);
}

std::string text(const json& j, const std::string& path, std::initializer_list<const char*> choices) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  const std::string s = j.get<std::string>();
  if (choices.size() > 0 &&
      std::none_of(choices.begin(), choices.end(), [&](const char* c) { return s == c; })) {
    std::string all;
    for (const char* c : choices) all += (all.empty() ? "" : ", ") + std::string(c);
    throw ConfigError(path, "must be one of: " + all);
  }
  return s;
}

std::vector<double> vector_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at_index(path, i)));
  return out;
}

void parse_triple(const json& j, const std::string& path, TripleSpec& t) {
  check_object(j, path, {"dim", "lambda", "p", "q", "horizon"});
  if (j.contains("dim")) t.dim = integer(j["dim"], join(path, "dim"), 1);
  if (j.contains("lambda")) {
    const json& l = j["lambda"];
    const std::string lp = join(path, "lambda");
    if (l.is_string()) {
      text(l, lp, {"k_squared"});
      t.lambda.clear();
    } else {
      t.lambda = vector_of(l, lp);
      for (std::size_t i = 0; i < t.lambda.size(); ++i) {
        if (t.lambda[i] <= 0.0) throw ConfigError(at_index(lp, i), "eigenvalues must be strictly positive");
        if (i > 0 && t.lambda[i] < t.lambda[i - 1]) throw ConfigError(at_index(lp, i), "eigenvalues must be nondecreasing");
      }
      if (j.contains("dim") && t.dim != static_cast<int>(t.lambda.size())) {
        throw ConfigError(lp, "length must equal dim");
      }
      t.dim = static_cast<int>(t.lambda.size());
    }
  }
  if (j.contains("p")) {
    t.p = number(j["p"], join(path, "p"));
    if (t.p < 2.0) throw ConfigError(join(path, "p"), "must be >= 2");
  }
  if (j.contains("q")) {
    const double q = number(j["q"], join(path, "q"));
    if (q <= 1.0) throw ConfigError(join(path, "q"), "must be > 1");
    if (j.contains("p")) {
      if (std::abs(1.0 / t.p + 1.0 / q - 1.0) > 1e-12) throw ConfigError(join(path, "q"), "inconsistent with p (1/p + 1/q must be 1)");
    } else {
      t.p = q / (q - 1.0);
      if (t.p < 2.0) throw ConfigError(join(path, "q"), "implies p < 2");
    }
  }
  if (j.contains("horizon")) t.horizon = positive(j["horizon"], join(path, "horizon"));
}

void parse_operator(const json& j, const std::string& path, OperatorSpec& o) {
  check_object(j, path, {"kind", "nu", "reaction", "custom_table", "grid_points"});
  if (j.contains("kind")) o.kind = text(j["kind"], join(path, "kind"), {"heat", "burgers", "reaction_diffusion", "gain_table"});
  if (j.contains("nu")) o.nu = positive(j["nu"], join(path, "nu"));
  if (j.contains("reaction")) o.reaction = vector_of(j["reaction"], join(path, "reaction"));
  if (j.contains("custom_table")) {
    const json& t = j["custom_table"];
    const std::string tp = join(path, "custom_table");
    if (!t.is_array() || t.empty()) throw ConfigError(tp, "expected a nonempty array of [from, gain] pairs");
    o.custom_table.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto row = vector_of(t[i], at_index(tp, i));
      if (row.size() != 2) throw ConfigError(at_index(tp, i), "expected [from, gain]");
      o.custom_table.emplace_back(row[0], row[1]);
    }
  }
  if (j.contains("grid_points")) o.grid_points = integer(j["grid_points"], join(path, "grid_points"), 4);
  if (o.kind == "gain_table" && o.custom_table.empty()) throw ConfigError(join(path, "custom_table"), "required for gain_table");
}

void parse_radius(const json& j, const std::string& path, RadiusLaw& r) {
  if (j.is_number()) {
    r = RadiusLaw{nonnegative(j, path), 0.0, 0.0};
    return;
  }
  check_object(j, path, {"base", "slope", "jump", "step_at"});
  if (j.contains("base")) r.base = nonnegative(j["base"], join(path, "base"));
  if (j.contains("slope")) r.slope = nonnegative(j["slope"], join(path, "slope"));
  if (j.contains("jump")) r.jump = number(j["jump"], join(path, "jump"));
  if (j.contains("step_at")) r.step_at = nonnegative(j["step_at"], join(path, "step_at"));
}

void parse_multifunction(const json& j, const std::string& path, MultifunctionSpec& m) {
  check_object(j, path, {"kind", "radius", "center", "vertices", "c_F"});
  if (j.contains("kind")) m.kind = text(j["kind"], join(path, "kind"), {"centered_ball", "affine_ball", "polytope"});
  if (j.contains("radius")) parse_radius(j["radius"], join(path, "radius"), m.radius);
  if (j.contains("center")) {
    const std::string cp = join(path, "center");
    check_object(j["center"], cp, {"offset", "gain"});
    if (j["center"].contains("offset")) m.center_offset = vector_of(j["center"]["offset"], join(cp, "offset"));
    if (j["center"].contains("gain")) m.center_gain = number(j["center"]["gain"], join(cp, "gain"));
  }
  if (j.contains("vertices")) {
    const json& v = j["vertices"];
    const std::string vp = join(path, "vertices");
    if (!v.is_array() || v.empty()) throw ConfigError(vp, "expected a nonempty array of points");
    m.vertices.clear();
    for (std::size_t i = 0; i < v.size(); ++i) m.vertices.push_back(vector_of(v[i], at_index(vp, i)));
  }
  if (j.contains("c_F")) m.c_F = nonnegative(j["c_F"], join(path, "c_F"));
  if (m.kind == "polytope" && m.vertices.empty()) throw ConfigError(join(path, "vertices"), "required for polytope");
}

void parse_constraint(const json& j, const std::string& path, ConstraintSpec& c) {
  check_object(j, path, {"kind", "center", "radius"});
  if (j.contains("kind")) c.kind = text(j["kind"], join(path, "kind"), {"h_ball", "affine_h_ball", "whole_space"});
  if (j.contains("center")) c.center = vector_of(j["center"], join(path, "center"));
  if (j.contains("radius")) c.radius = nonnegative(j["radius"], join(path, "radius"));
  if (c.kind == "affine_h_ball" && c.center.empty()) throw ConfigError(join(path, "center"), "required for affine_h_ball");
}

void parse_cost(const json& j, const std::string& path, CostSpec& c) {
  check_object(j, path, {"kind", "target", "radius", "tolerance"});
  if (j.contains("kind")) c.kind = text(j["kind"], join(path, "kind"), {"norm_target", "indicator_tube"});
  if (j.contains("target")) c.target = vector_of(j["target"], join(path, "target"));
  if (j.contains("radius")) c.radius = positive(j["radius"], join(path, "radius"));
  if (j.contains("tolerance")) c.tolerance = nonnegative(j["tolerance"], join(path, "tolerance"));
}

void parse_start(const json& j, const std::string& path, StartSpec& s) {
  check_object(j, path, {"t0", "x0", "history"});
  if (j.contains("t0")) s.t0 = nonnegative(j["t0"], join(path, "t0"));
  if (j.contains("x0")) s.x0 = vector_of(j["x0"], join(path, "x0"));
  if (j.contains("history")) {
    const json& h = j["history"];
    const std::string hp = join(path, "history");
    if (!h.is_array()) throw ConfigError(hp, "expected an array of {t, x} knots");
    s.history.clear();
    for (std::size_t i = 0; i < h.size(); ++i) {
      const std::string kp = at_index(hp, i);
      check_object(h[i], kp, {"t", "x"});
      if (!h[i].contains("t") || !h[i].contains("x")) throw ConfigError(kp, "knot needs t and x");
      HistoryKnot k{nonnegative(h[i]["t"], join(kp, "t")), vector_of(h[i]["x"], join(kp, "x"))};
      if (!s.history.empty() && k.t <= s.history.back().t) throw ConfigError(join(kp, "t"), "knot times must increase");
      s.history.push_back(std::move(k));
    }
  }
}

void parse_grid(const json& j, const std::string& path, GridSettings& g) {
  check_object(j, path, {"steps_per_unit", "value_time_nodes", "value_state_nodes", "state_extent"});
  if (j.contains("steps_per_unit")) g.steps_per_unit = integer(j["steps_per_unit"], join(path, "steps_per_unit"), 1);
  if (j.contains("value_time_nodes")) g.value_time_nodes = integer(j["value_time_nodes"], join(path, "value_time_nodes"), 2);
  if (j.contains("value_state_nodes")) g.value_state_nodes = integer(j["value_state_nodes"], join(path, "value_state_nodes"), 3);
  if (j.contains("state_extent")) g.state_extent = nonnegative(j["state_extent"], join(path, "state_extent"));
}

void parse_tolerances(const json& j, const std::string& path, ToleranceSettings& t) {
  check_object(j, path, {"hypothesis", "tol_K", "tol_u", "dpp"});
  if (j.contains("hypothesis")) t.hypothesis = positive(j["hypothesis"], join(path, "hypothesis"));
  if (j.contains("tol_K")) t.tol_K = positive(j["tol_K"], join(path, "tol_K"));
  if (j.contains("tol_u")) t.tol_u = positive(j["tol_u"], join(path, "tol_u"));
  if (j.contains("dpp")) t.dpp = positive(j["dpp"], join(path, "dpp"));
}

void parse_samples(const json& j, const std::string& path, SampleSettings& s) {
  check_object(j, path, {"hypothesis", "fit", "trajectories", "controls", "radius"});
  if (j.contains("hypothesis")) s.hypothesis = integer(j["hypothesis"], join(path, "hypothesis"), 1);
  if (j.contains("fit")) s.fit = integer(j["fit"], join(path, "fit"), 1);
  if (j.contains("trajectories")) s.trajectories = integer(j["trajectories"], join(path, "trajectories"), 1);
  if (j.contains("controls")) s.controls = integer(j["controls"], join(path, "controls"), 1);
  if (j.contains("radius")) s.radius = positive(j["radius"], join(path, "radius"));
}

void parse_viability(const json& j, const std::string& path, ViabilitySettings& v) {
  check_object(j, path, {"n_max", "epsilon"});
  if (j.contains("n_max")) v.n_max = integer(j["n_max"], join(path, "n_max"), 1);
  if (j.contains("epsilon")) v.epsilon = positive(j["epsilon"], join(path, "epsilon"));
}

void check_dimensions(const RunConfig& c) {
  const std::size_t n = static_cast<std::size_t>(c.triple.dim);
  auto same = [n](const std::vector<double>& v, const std::string& path) {
    if (!v.empty() && v.size() != n) throw ConfigError(path, "length must equal triple.dim");
  };
  same(c.mf.center_offset, "multifunction.center.offset");
  for (std::size_t i = 0; i < c.mf.vertices.size(); ++i) same(c.mf.vertices[i], at_index("multifunction.vertices", i));
  same(c.constraint.center, "constraint.center");
  same(c.cost.target, "cost.target");
  same(c.start.x0, "start.x0");
  for (std::size_t i = 0; i < c.start.history.size(); ++i) same(c.start.history[i].x, at_index("start.history", i) + ".x");
  if (c.start.t0 >= c.triple.horizon) throw ConfigError("start.t0", "must be < triple.horizon");
  if (!c.start.history.empty()) {
    if (std::abs(c.start.history.back().t - c.start.t0) > 1e-12) throw ConfigError("start.history", "last knot must sit at t0");
    if (c.start.history.front().t > 1e-12) throw ConfigError("start.history", "first knot must sit at 0");
  }
  if (c.op.kind == "burgers" || c.op.kind == "reaction_diffusion") {
    if (c.op.grid_points < 2 * c.triple.dim) throw ConfigError("operator.grid_points", "must be >= 2·dim");
  }
}

json vec(const std::vector<double>& v) { return json(v); }

}  // namespace

SpectralTriple TripleSpec::build() const {
  if (lambda.empty()) return SpectralTriple(dim, p, horizon);
  return SpectralTriple(lambda, p, horizon);
}

OperatorPtr OperatorSpec::build(const SpectralTriple& triple) const {
  if (kind == "heat") return make_heat(triple, nu);
  if (kind == "burgers") return make_burgers(triple, nu, grid_points);
  if (kind == "reaction_diffusion") return make_reaction_diffusion(triple, reaction, grid_points);
  if (kind == "gain_table") return make_gain_table(triple, custom_table);
  throw ConfigError("operator.kind", "unknown operator kind");
}

MultifunctionPtr MultifunctionSpec::build(int dim) const {
  auto as_vector = [dim](const std::vector<double>& v) {
    if (v.empty()) return StateVector(StateVector::Zero(dim));
    return StateVector(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  if (kind == "polytope") {
    std::vector<StateVector> pts;
    double c = 0.0;
    for (const auto& v : vertices) {
      pts.push_back(as_vector(v));
      c = std::max(c, pts.back().norm());
    }
    return std::make_shared<const Multifunction>(Multifunction::polytope(std::move(pts), c_F.value_or(c)));
  }
  const StateVector offset = as_vector(center_offset);
  const double auto_c = std::max(offset.norm() + radius.base + std::max(0.0, radius.jump),
                                 std::abs(center_gain) + radius.slope);
  if (kind == "centered_ball") {
    return std::make_shared<const Multifunction>(Multifunction::centered_ball(dim, radius, c_F.value_or(auto_c)));
  }
  return std::make_shared<const Multifunction>(
      Multifunction::affine_ball(CenterLaw{offset, center_gain}, radius, c_F.value_or(auto_c)));
}

ConstraintSet ConstraintSpec::build(int dim) const {
  if (kind == "whole_space") return ConstraintSet::whole_space(dim);
  if (kind == "h_ball" && center.empty()) return ConstraintSet::h_ball(dim, radius);
  StateVector c = center.empty() ? StateVector(StateVector::Zero(dim))
                                 : StateVector(Eigen::Map<const Eigen::VectorXd>(center.data(), dim));
  return ConstraintSet::affine_h_ball(std::move(c), radius);
}

TerminalCost CostSpec::build(int dim) const {
  if (kind == "indicator_tube") return TerminalCost::indicator_tube(dim, radius, tolerance);
  StateVector t = target.empty() ? StateVector(StateVector::Zero(dim))
                                 : StateVector(Eigen::Map<const Eigen::VectorXd>(target.data(), dim));
  return TerminalCost::norm_target(std::move(t));
}

RunConfig parse_config(const std::string& input) {
  json j;
  try {
    j = json::parse(input);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  check_object(j, "", {"scenario", "seed", "out", "triple", "operator", "multifunction", "constraint", "cost", "start",
                       "grid", "tolerances", "samples", "viability"});
  RunConfig c;
  if (j.contains("scenario")) {
    c.scenario = text(j["scenario"], "scenario",
                      {"check-hypotheses", "simulate", "viability", "value", "hjb-suite", "example-4-4"});
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out")) {
    c.out = text(j["out"], "out", {});
    if (c.out.empty()) throw ConfigError("out", "must be nonempty");
  }
  if (j.contains("triple")) parse_triple(j["triple"], "triple", c.triple);
  if (j.contains("operator")) parse_operator(j["operator"], "operator", c.op);
  if (j.contains("multifunction")) parse_multifunction(j["multifunction"], "multifunction", c.mf);
  if (j.contains("constraint")) parse_constraint(j["constraint"], "constraint", c.constraint);
  if (j.contains("cost")) parse_cost(j["cost"], "cost", c.cost);
  if (j.contains("start")) parse_start(j["start"], "start", c.start);
  if (j.contains("grid")) parse_grid(j["grid"], "grid", c.grid);
  if (j.contains("tolerances")) parse_tolerances(j["tolerances"], "tolerances", c.tolerances);
  if (j.contains("samples")) parse_samples(j["samples"], "samples", c.samples);
  if (j.contains("viability")) parse_viability(j["viability"], "viability", c.viability);
  check_dimensions(c);
  return c;
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["triple"] = {{"dim", c.triple.dim},
                 {"lambda", c.triple.lambda.empty() ? json("k_squared") : vec(c.triple.lambda)},
                 {"p", c.triple.p},
                 {"horizon", c.triple.horizon}};
  json table = json::array();
  for (const auto& [from, gain] : c.op.custom_table) table.push_back({from, gain});
  j["operator"] = {{"kind", c.op.kind},
                   {"nu", c.op.nu},
                   {"reaction", vec(c.op.reaction)},
                   {"custom_table", table},
                   {"grid_points", c.op.grid_points}};
  json radius = {{"base", c.mf.radius.base}, {"slope", c.mf.radius.slope}, {"jump", c.mf.radius.jump}};
  if (std::isfinite(c.mf.radius.step_at)) radius["step_at"] = c.mf.radius.step_at;
  json mf = {{"kind", c.mf.kind},
             {"radius", radius},
             {"center", {{"offset", vec(c.mf.center_offset)}, {"gain", c.mf.center_gain}}},
             {"vertices", c.mf.vertices}};
  if (c.mf.c_F) mf["c_F"] = *c.mf.c_F;
  j["multifunction"] = mf;
  j["constraint"] = {{"kind", c.constraint.kind}, {"center", vec(c.constraint.center)}, {"radius", c.constraint.radius}};
  j["cost"] = {{"kind", c.cost.kind},
               {"target", vec(c.cost.target)},
               {"radius", c.cost.radius},
               {"tolerance", c.cost.tolerance}};
  json history = json::array();
  for (const auto& k : c.start.history) history.push_back({{"t", k.t}, {"x", k.x}});
  j["start"] = {{"t0", c.start.t0}, {"x0", vec(c.start.x0)}, {"history", history}};
  j["grid"] = {{"steps_per_unit", c.grid.steps_per_unit},
               {"value_time_nodes", c.grid.value_time_nodes},
               {"value_state_nodes", c.grid.value_state_nodes},
               {"state_extent", c.grid.state_extent}};
  j["tolerances"] = {{"hypothesis", c.tolerances.hypothesis},
                     {"tol_K", c.tolerances.tol_K},
                     {"tol_u", c.tolerances.tol_u},
                     {"dpp", c.tolerances.dpp}};
  j["samples"] = {{"hypothesis", c.samples.hypothesis},
                  {"fit", c.samples.fit},
                  {"trajectories", c.samples.trajectories},
                  {"controls", c.samples.controls},
                  {"radius", c.samples.radius}};
  j["viability"] = {{"n_max", c.viability.n_max}, {"epsilon", c.viability.epsilon}};
  // Empty arrays are the "not set" form and must round-trip through the parser.
  for (auto* section : {&j["operator"], &j["multifunction"]["center"], &j["constraint"], &j["cost"], &j["start"]}) {
    for (auto it = section->begin(); it != section->end();) {
      if (it->is_array() && it->empty()) {
        it = section->erase(it);
      } else {
        ++it;
      }
    }
  }
  if (j["multifunction"]["vertices"].empty()) j["multifunction"].erase("vertices");
  if (c.scenario.empty()) j.erase("scenario");
  return j.dump(2) + "\n";
}

namespace {

const std::map<std::string, const char*>& presets() {
  static const std::map<std::string, const char*> table = {
      {"heat", R"({
        "triple": {"dim": 8, "lambda": "k_squared", "p": 2, "horizon": 1},
        "operator": {"kind": "heat", "nu": 1},
        "multifunction": {"kind": "centered_ball", "radius": 1},
        "constraint": {"kind": "h_ball", "radius": 2},
        "start": {"x0": [1, 0, 0, 0, 0, 0, 0, 0]}
      })"},
      {"burgers", R"({
        "triple": {"dim": 8, "lambda": "k_squared", "p": 2, "horizon": 1},
        "operator": {"kind": "burgers", "nu": 0.5, "grid_points": 64},
        "multifunction": {"kind": "centered_ball", "radius": 1},
        "constraint": {"kind": "h_ball", "radius": 2},
        "start": {"x0": [1, 0, 0, 0, 0, 0, 0, 0]},
        "samples": {"hypothesis": 10000, "fit": 10000}
      })"},
      {"ball", R"({
        "triple": {"dim": 8, "lambda": "k_squared", "p": 2, "horizon": 1},
        "operator": {"kind": "heat", "nu": 1},
        "multifunction": {"kind": "centered_ball", "radius": 1},
        "constraint": {"kind": "h_ball", "radius": 2},
        "start": {"x0": [1.5, 0.5, 0, 0, 0, 0, 0, 0]},
        "viability": {"n_max": 6}
      })"},
      {"offcenter-ball", R"({
        "triple": {"dim": 1, "lambda": [1], "p": 2, "horizon": 1},
        "operator": {"kind": "heat", "nu": 1},
        "multifunction": {"kind": "centered_ball", "radius": 1},
        "constraint": {"kind": "affine_h_ball", "center": [5], "radius": 0.5},
        "start": {"x0": [5]},
        "viability": {"n_max": 4}
      })"},
      {"radial", R"({
        "triple": {"dim": 1, "lambda": [1], "p": 2, "horizon": 0.6931471805599453},
        "operator": {"kind": "heat", "nu": 1},
        "multifunction": {"kind": "centered_ball", "radius": 1},
        "cost": {"kind": "norm_target", "target": [0]},
        "start": {"x0": [4]},
        "grid": {"steps_per_unit": 8192}
      })"},
      {"example-4-4", R"({
        "triple": {"dim": 8, "lambda": "k_squared", "p": 2, "horizon": 1},
        "operator": {"kind": "heat", "nu": 1},
        "multifunction": {"kind": "centered_ball", "radius": 1},
        "constraint": {"kind": "h_ball", "radius": 2},
        "cost": {"kind": "indicator_tube", "radius": 2},
        "start": {"t0": 0.25, "x0": [1, 0.5, 0, 0, 0, 0, 0, 0]},
        "viability": {"n_max": 4}
      })"},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, body] : presets()) out.push_back(name);
  return out;
}

RunConfig preset_config(const std::string& name) {
  const auto& table = presets();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("preset", "unknown preset '" + name + "'");
  return parse_config(it->second);
}

TimeGrid build_grid(const RunConfig& config) {
  return TimeGrid::uniform(config.triple.horizon, config.grid.steps_per_unit);
}

std::pair<Trajectory, int> build_history(const RunConfig& config, const TimeGrid& grid) {
  const int dim = config.triple.dim;
  StateVector x0 = StateVector::Zero(dim);
  const auto& knots = config.start.history;
  if (!config.start.x0.empty()) {
    x0 = Eigen::Map<const Eigen::VectorXd>(config.start.x0.data(), dim);
  } else if (!knots.empty()) {
    x0 = Eigen::Map<const Eigen::VectorXd>(knots.back().x.data(), dim);
  } else {
    x0(0) = 1.0;
  }
  int start = 0;
  try {
    start = grid.index_of(config.start.t0);
  } catch (const ContractViolation&) {
    throw ConfigError("start.t0", "must be a node of the solver grid");
  }
  Trajectory h = Trajectory::constant(grid, x0, start);
  if (!knots.empty()) {
    for (int i = 0; i <= start; ++i) {
      const double t = grid.node(i);
      std::size_t k = 0;
      while (k + 2 < knots.size() && knots[k + 1].t <= t) ++k;
      const auto& a = knots[k];
      const auto& b = knots[std::min(k + 1, knots.size() - 1)];
      const double w = b.t > a.t ? std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0) : 0.0;
      for (int d = 0; d < dim; ++d) h.states(d, i) = (1.0 - w) * a.x[d] + w * b.x[d];
    }
    if ((h.state(start) - x0).norm() > 1e-12) {
      throw ConfigError("start.history", "last knot must equal x0");
    }
    for (int i = start + 1; i <= grid.n_steps(); ++i) h.states.col(i) = h.states.col(start);
  }
  return {h, start};
}

}  // namespace inclusion_lab
