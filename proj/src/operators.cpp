// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::heat: return "heat";
    case OperatorKind::burgers: return "burgers";
    case OperatorKind::reaction_diffusion: return "reaction_diffusion";
    case OperatorKind::custom: return "custom";
  }
  return "unknown";
}

Operator::Operator(OperatorKind kind, SpectralTriple triple, Eigen::VectorXd stiff)
    : kind_(kind), triple_(std::move(triple)), stiff_(std::move(stiff)) {
  if (stiff_.size() == 0) stiff_ = Eigen::VectorXd::Zero(triple_.dim());
  require(stiff_.size() == triple_.dim(), "Operator: stiff diagonal has wrong dimension");
}

StateVector Operator::explicit_part(double t, const StateVector& x) const {
  triple_.check(x);
  StateVector out = evaluate_explicit(t, x);
  if (!out.allFinite()) throw EvaluationError("operator " + to_string(kind_) + " produced a non-finite value");
  return out;
}

StateVector Operator::apply(double t, const StateVector& x) const {
  triple_.check(x);
  StateVector out = (stiff_.array() * x.array()).matrix() + evaluate_explicit(t, x);
  if (!out.allFinite()) throw EvaluationError("operator " + to_string(kind_) + " produced a non-finite value");
  return out;
}

Eigen::MatrixXd Operator::jacobian(double t, const StateVector& x) const {
  const int n = triple_.dim();
  Eigen::MatrixXd jac(n, n);
  const double scale = std::max(1.0, x.norm());
  const double h = 1e-6 * scale;
  StateVector xp = x;
  StateVector xm = x;
  for (int k = 0; k < n; ++k) {
    xp(k) = x(k) + h;
    xm(k) = x(k) - h;
    jac.col(k) = (evaluate_explicit(t, xp) - evaluate_explicit(t, xm)) / (2.0 * h);
    xp(k) = x(k);
    xm(k) = x(k);
  }
  jac.diagonal() += stiff_;
  return jac;
}

namespace {

class HeatOperator final : public Operator {
 public:
  HeatOperator(const SpectralTriple& triple, double diffusivity)
      : Operator(OperatorKind::heat, triple, diffusivity * triple.eigenvalues()), kappa_(diffusivity) {
    require(diffusivity > 0.0, "heat: diffusivity must be positive");
  }

  Eigen::MatrixXd jacobian(double, const StateVector&) const override {
    return stiff_diagonal().asDiagonal();
  }
  bool is_diagonal_linear() const override { return true; }
  double coercivity_hint() const override { return kappa_; }
  double growth_exponent_hint() const override { return 0.0; }
  std::map<std::string, double> parameters() const override { return {{"diffusivity", kappa_}}; }

 protected:
  StateVector evaluate_explicit(double, const StateVector& x) const override {
    return StateVector::Zero(x.size());
  }

 private:
  double kappa_;
};

/// Skew-symmetric central-difference convection (1/3)[(u²)' + u u'] with
/// homogeneous Dirichlet ghost values.
Eigen::VectorXd skew_convection(const Eigen::VectorXd& u, double h) {
  const Eigen::Index m = u.size();
  Eigen::VectorXd out(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double left = j > 0 ? u(j - 1) : 0.0;
    const double right = j + 1 < m ? u(j + 1) : 0.0;
    out(j) = ((right * right - left * left) + u(j) * (right - left)) / (6.0 * h);
  }
  return out;
}

class BurgersOperator final : public Operator {
 public:
  BurgersOperator(const SpectralTriple& triple, double nu, int grid_points)
      : Operator(OperatorKind::burgers, triple, nu * triple.eigenvalues()),
        nu_(nu),
        grid_(triple.dim(), grid_points) {
    require(nu > 0.0, "burgers: viscosity must be positive");
  }

  double coercivity_hint() const override { return nu_; }
  double growth_exponent_hint() const override { return 1.0; }
  std::map<std::string, double> parameters() const override {
    return {{"nu", nu_}, {"grid_points", double(grid_.points())}};
  }

 protected:
  StateVector evaluate_explicit(double, const StateVector& x) const override {
    return grid_.analyze(skew_convection(grid_.synthesize(x), grid_.spacing()));
  }

 private:
  double nu_;
  SineGrid grid_;
};

class ReactionDiffusionOperator final : public Operator {
 public:
  ReactionDiffusionOperator(const SpectralTriple& triple, std::vector<double> reaction, int grid_points)
      : Operator(OperatorKind::reaction_diffusion, triple, triple.eigenvalues()),
        reaction_(std::move(reaction)),
        grid_(triple.dim(), grid_points) {
    for (double a : reaction_) require(std::isfinite(a), "reaction_diffusion: coefficients must be finite");
  }

  double coercivity_hint() const override { return 1.0; }
  double growth_exponent_hint() const override {
    return std::max(0.0, double(reaction_.size()) - 2.0);
  }
  std::map<std::string, double> parameters() const override {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < reaction_.size(); ++i) out["a" + std::to_string(i)] = reaction_[i];
    return out;
  }

 protected:
  StateVector evaluate_explicit(double, const StateVector& x) const override {
    Eigen::VectorXd u = grid_.synthesize(x);
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      double acc = 0.0;
      for (auto it = reaction_.rbegin(); it != reaction_.rend(); ++it) acc = acc * u(j) + *it;
      u(j) = acc;
    }
    return grid_.analyze(u);
  }

 private:
  std::vector<double> reaction_;
  SineGrid grid_;
};

class GainTableOperator final : public Operator {
 public:
  GainTableOperator(const SpectralTriple& triple, std::vector<std::pair<double, double>> table)
      : Operator(OperatorKind::custom, triple, Eigen::VectorXd{}), table_(std::move(table)) {
    require(!table_.empty(), "custom_table: at least one entry required");
    require(table_.front().first == 0.0, "custom_table: first entry must start at 0");
    for (std::size_t i = 0; i < table_.size(); ++i) {
      require(table_[i].second > 0.0, "custom_table: gains must be positive");
      if (i > 0) require(table_[i].first > table_[i - 1].first, "custom_table: breakpoints must increase");
    }
  }

  double coercivity_hint() const override {
    double g = table_.front().second;
    for (const auto& e : table_) g = std::min(g, e.second);
    return g;
  }
  double growth_exponent_hint() const override { return 0.0; }

 protected:
  StateVector evaluate_explicit(double, const StateVector& x) const override {
    const double r = x.norm();
    double gain = table_.front().second;
    for (const auto& [from, g] : table_)
      if (r > from) gain = g;
    return gain * (triple().eigenvalues().array() * x.array()).matrix();
  }

 private:
  std::vector<std::pair<double, double>> table_;
};

class FunctionOperator final : public Operator {
 public:
  FunctionOperator(const SpectralTriple& triple, std::function<StateVector(double, const StateVector&)> fn,
                   Eigen::VectorXd stiff, double coercivity, double growth_alpha)
      : Operator(OperatorKind::custom, triple, std::move(stiff)),
        fn_(std::move(fn)),
        coercivity_(coercivity),
        alpha_(growth_alpha) {
    require(static_cast<bool>(fn_), "custom operator: callable required");
  }

  double coercivity_hint() const override { return coercivity_; }
  double growth_exponent_hint() const override { return alpha_; }

 protected:
  StateVector evaluate_explicit(double t, const StateVector& x) const override { return fn_(t, x); }

 private:
  std::function<StateVector(double, const StateVector&)> fn_;
  double coercivity_;
  double alpha_;
};

}  // namespace

OperatorPtr make_heat(const SpectralTriple& triple, double diffusivity) {
  return std::make_shared<HeatOperator>(triple, diffusivity);
}

OperatorPtr make_burgers(const SpectralTriple& triple, double nu, int grid_points) {
  return std::make_shared<BurgersOperator>(triple, nu, grid_points);
}

OperatorPtr make_reaction_diffusion(const SpectralTriple& triple, std::vector<double> reaction,
                                    int grid_points) {
  return std::make_shared<ReactionDiffusionOperator>(triple, std::move(reaction), grid_points);
}

OperatorPtr make_gain_table(const SpectralTriple& triple, std::vector<std::pair<double, double>> table) {
  return std::make_shared<GainTableOperator>(triple, std::move(table));
}

OperatorPtr make_custom(const SpectralTriple& triple,
                        std::function<StateVector(double, const StateVector&)> explicit_part,
                        Eigen::VectorXd stiff, double coercivity_hint, double growth_exponent_hint) {
  return std::make_shared<FunctionOperator>(triple, std::move(explicit_part), std::move(stiff),
                                            coercivity_hint, growth_exponent_hint);
}

// ---------------------------------------------------------------------------

double PowerLaw::operator()(const SpectralTriple& triple, const StateVector& x) const {
  if (coef == 0.0) return 0.0;
  return coef * std::pow(triple.v_norm(x), v_power) * std::pow(triple.h_norm(x), h_power);
}

OperatorCertificates heat_certificates(double diffusivity) {
  OperatorCertificates c;
  c.monotonicity.c0 = 0.0;
  c.monotonicity.beta = 1.0;
  c.growth.c1 = diffusivity;
  c.growth.alpha = 0.0;
  c.growth.c2 = diffusivity;
  c.growth.c3 = 0.0;
  return c;
}

namespace {

Witness point_witness(double t, const StateVector& x, const StateVector& y, double lhs, double rhs) {
  Witness w;
  w.scalars = {{"t", t}, {"lhs", lhs}, {"rhs", rhs}};
  w.vectors["x"] = std::vector<double>(x.data(), x.data() + x.size());
  w.vectors["y"] = std::vector<double>(y.data(), y.data() + y.size());
  return w;
}

std::vector<SamplePoint> draw(HypothesisSampler& sampler, int n) {
  require(n >= 1, "hypothesis check: n_samples must be >= 1");
  std::vector<SamplePoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(sampler.next());
  return pts;
}

double fA_at(const GrowthCoercivityCertificate& cert, double t) {
  const double v = cert.fA ? cert.fA(t) : 0.0;
  require(v >= 0.0, "certificate: f^A must be nonnegative");
  return v;
}

}  // namespace

HypothesisReport check_local_monotonicity(const Operator& op, const MonotonicityCertificate& cert,
                                          HypothesisSampler& sampler, int n_samples, double tolerance) {
  const SpectralTriple& tr = op.triple();
  const auto pts = draw(sampler, n_samples);
  std::vector<double> margins(pts.size());
  std::vector<std::pair<double, double>> sides(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& s = pts[i];
    const StateVector diff = s.x - s.y;
    const double lhs = tr.pairing(op.apply(s.t, s.x) - op.apply(s.t, s.y), diff);
    const double rhs = -(cert.c0 + cert.rho(tr, s.x) + cert.eta(tr, s.y)) * diff.squaredNorm();
    double m = margin_ge(lhs, rhs);
    // Growth bound on ρ + η at both sample points.
    for (const StateVector* z : {&s.x, &s.y}) {
      const double bound_lhs = cert.rho(tr, *z) + cert.eta(tr, *z);
      const double bound_rhs = std::abs(cert.c0) * (1.0 + std::pow(tr.v_norm(*z), tr.p())) *
                               (1.0 + std::pow(tr.h_norm(*z), cert.beta));
      m = std::min(m, margin_le(bound_lhs, bound_rhs));
    }
    margins[i] = m;
    sides[i] = {lhs, rhs};
  });
  HypothesisReport report;
  report.hypothesis = "local_monotonicity";
  for (std::size_t i = 0; i < pts.size(); ++i)
    report.record(margins[i], tolerance, point_witness(pts[i].t, pts[i].x, pts[i].y, sides[i].first, sides[i].second));
  return report;
}

HypothesisReport check_growth(const Operator& op, const GrowthCoercivityCertificate& cert,
                              HypothesisSampler& sampler, int n_samples, double tolerance) {
  const SpectralTriple& tr = op.triple();
  const auto pts = draw(sampler, n_samples);
  std::vector<std::pair<double, double>> sides(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& s = pts[i];
    const double lhs = tr.vstar_norm(op.apply(s.t, s.x));
    const double rhs = (std::pow(fA_at(cert, s.t), 1.0 / tr.q()) + cert.c1 * std::pow(tr.v_norm(s.x), tr.p() - 1.0)) *
                       (1.0 + std::pow(tr.h_norm(s.x), cert.alpha));
    sides[i] = {lhs, rhs};
  });
  HypothesisReport report;
  report.hypothesis = "growth";
  for (std::size_t i = 0; i < pts.size(); ++i)
    report.record(margin_le(sides[i].first, sides[i].second), tolerance,
                  point_witness(pts[i].t, pts[i].x, pts[i].x, sides[i].first, sides[i].second));
  return report;
}

HypothesisReport check_coercivity(const Operator& op, const GrowthCoercivityCertificate& cert,
                                  HypothesisSampler& sampler, int n_samples, double tolerance) {
  const SpectralTriple& tr = op.triple();
  require(cert.c2 > 0.0, "coercivity certificate: c2 must be positive");
  const auto pts = draw(sampler, n_samples);
  std::vector<std::pair<double, double>> sides(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& s = pts[i];
    const double lhs = tr.pairing(op.apply(s.t, s.x), s.x);
    const double rhs = cert.c2 * std::pow(tr.v_norm(s.x), tr.p()) - cert.c3 * s.x.squaredNorm() - fA_at(cert, s.t);
    sides[i] = {lhs, rhs};
  });
  HypothesisReport report;
  report.hypothesis = "coercivity";
  for (std::size_t i = 0; i < pts.size(); ++i)
    report.record(margin_ge(sides[i].first, sides[i].second), tolerance,
                  point_witness(pts[i].t, pts[i].x, pts[i].x, sides[i].first, sides[i].second));
  return report;
}

std::vector<double> uniform_s_grid(int n) {
  require(n >= 1, "uniform_s_grid: need at least one interval");
  std::vector<double> s(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) s[static_cast<std::size_t>(i)] = double(i) / n;
  return s;
}

HypothesisReport check_hemicontinuity(const Operator& op, double t, const StateVector& x,
                                      const StateVector& y, const StateVector& v,
                                      const std::vector<double>& s_grid, double tolerance) {
  require(s_grid.size() >= 2, "check_hemicontinuity: need at least two grid points");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    require(s_grid[i] >= 0.0 && s_grid[i] <= 1.0, "check_hemicontinuity: s_grid must lie in [0, 1]");
    if (i > 0) require(s_grid[i] > s_grid[i - 1], "check_hemicontinuity: s_grid must increase");
  }
  const SpectralTriple& tr = op.triple();
  auto g = [&](double s) { return tr.pairing(op.apply(t, x + s * y), v); };

  std::vector<double> values(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) values[i] = g(s_grid[i]);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double threshold = tolerance * (1.0 + (*hi - *lo));

  HypothesisReport report;
  report.hypothesis = "hemicontinuity";
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i) {
    double a = s_grid[i], b = s_grid[i + 1];
    double ga = values[i], gb = values[i + 1];
    while (b - a > 1e-12) {
      const double mid = 0.5 * (a + b);
      const double gm = g(mid);
      if (std::abs(gm - ga) >= std::abs(gb - gm)) {
        b = mid;
        gb = gm;
      } else {
        a = mid;
        ga = gm;
      }
    }
    const double jump = std::abs(gb - ga);
    Witness w;
    w.scalars = {{"t", t}, {"s_left", a}, {"s_right", b}, {"jump", jump}, {"threshold", threshold}};
    report.record((threshold - jump) / std::max(1.0, threshold), 0.0, w);
  }
  return report;
}

OperatorCertificates fit_certificates(const Operator& op, HypothesisSampler& sampler, int n_samples,
                                      double safety) {
  require(safety >= 1.0, "fit_certificates: safety factor must be >= 1");
  const SpectralTriple& tr = op.triple();
  const auto pts = draw(sampler, n_samples);
  const double alpha = op.growth_exponent_hint();
  const double c2 = op.coercivity_hint();
  require(c2 > 0.0, "fit_certificates: operator has no positive coercivity constant");

  double mono_ratio = 0.0, growth_ratio = 0.0, coerc_deficit = 0.0;
  for (const auto& s : pts) {
    const StateVector diff = s.x - s.y;
    const double pair = tr.pairing(op.apply(s.t, s.x) - op.apply(s.t, s.y), diff);
    const double denom = diff.squaredNorm() * std::pow(tr.v_norm(s.y), 2.0);
    if (pair < 0.0 && denom > 0.0) mono_ratio = std::max(mono_ratio, -pair / denom);

    const double vx = tr.v_norm(s.x);
    const double gdenom = std::pow(vx, tr.p() - 1.0) * (1.0 + std::pow(tr.h_norm(s.x), alpha));
    if (gdenom > 0.0) growth_ratio = std::max(growth_ratio, tr.vstar_norm(op.apply(s.t, s.x)) / gdenom);

    const double hx2 = s.x.squaredNorm();
    const double deficit = c2 * std::pow(vx, tr.p()) - tr.pairing(op.apply(s.t, s.x), s.x);
    if (hx2 > 0.0 && deficit > 1e-10 * std::max(1.0, c2 * std::pow(vx, tr.p())))
      coerc_deficit = std::max(coerc_deficit, deficit / hx2);
  }

  OperatorCertificates cert;
  const double c_mono = safety * mono_ratio;
  cert.monotonicity.c0 = c_mono;
  cert.monotonicity.rho = PowerLaw{};
  cert.monotonicity.eta = PowerLaw{c_mono, 2.0, 0.0};
  cert.monotonicity.beta = 1.0;
  cert.growth.c1 = safety * growth_ratio;
  cert.growth.alpha = alpha;
  cert.growth.c2 = c2;
  cert.growth.c3 = safety * coerc_deficit;
  return cert;
}

}  // namespace inclusion_lab
