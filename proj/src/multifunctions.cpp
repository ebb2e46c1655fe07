// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/multifunctions.hpp"

#include <algorithm>
#include <cmath>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

std::string to_string(MultifunctionKind kind) {
  switch (kind) {
    case MultifunctionKind::centered_ball: return "centered_ball";
    case MultifunctionKind::affine_ball: return "affine_ball";
    case MultifunctionKind::polytope: return "polytope";
  }
  return "unknown";
}

double RadiusLaw::of_norm(double n) const {
  double r = base + slope * n;
  if (n > step_at) r += jump;
  return std::max(0.0, r);
}

StateVector CenterLaw::operator()(const StateVector& x) const { return offset + gain * x; }

namespace {

void check_radius_law(const RadiusLaw& r) {
  require(std::isfinite(r.base) && r.base >= 0.0, "multifunction: radius base must be finite and >= 0");
  require(std::isfinite(r.slope) && r.slope >= 0.0, "multifunction: radius slope must be finite and >= 0");
  require(std::isfinite(r.jump), "multifunction: radius jump must be finite");
  require(r.base + std::min(0.0, r.jump) >= 0.0, "multifunction: radius law must stay nonnegative");
}

}  // namespace

Multifunction Multifunction::centered_ball(int dim, RadiusLaw radius, double growth_constant) {
  require(dim >= 1, "multifunction: dim must be positive");
  require(growth_constant >= 0.0, "multifunction: c_F must be >= 0");
  check_radius_law(radius);
  Multifunction mf;
  mf.kind_ = MultifunctionKind::centered_ball;
  mf.dim_ = dim;
  mf.radius_ = radius;
  mf.center_.offset = StateVector::Zero(dim);
  mf.c_F_ = growth_constant;
  return mf;
}

Multifunction Multifunction::affine_ball(CenterLaw center, RadiusLaw radius, double growth_constant) {
  require(center.offset.size() >= 1, "multifunction: center offset required");
  require(center.offset.allFinite() && std::isfinite(center.gain), "multifunction: center law must be finite");
  require(growth_constant >= 0.0, "multifunction: c_F must be >= 0");
  check_radius_law(radius);
  Multifunction mf;
  mf.kind_ = MultifunctionKind::affine_ball;
  mf.dim_ = static_cast<int>(center.offset.size());
  mf.radius_ = radius;
  mf.center_ = std::move(center);
  mf.c_F_ = growth_constant;
  return mf;
}

Multifunction Multifunction::polytope(std::vector<StateVector> vertices, double growth_constant) {
  require(!vertices.empty(), "multifunction: polytope needs at least one vertex");
  require(growth_constant >= 0.0, "multifunction: c_F must be >= 0");
  const auto dim = vertices.front().size();
  require(dim >= 1, "multifunction: vertices must be nonempty vectors");
  StateVector bary = StateVector::Zero(dim);
  for (const auto& v : vertices) {
    require(v.size() == dim, "multifunction: vertices must share one dimension");
    require(v.allFinite(), "multifunction: vertices must be finite");
    bary += v;
  }
  Multifunction mf;
  mf.kind_ = MultifunctionKind::polytope;
  mf.dim_ = static_cast<int>(dim);
  mf.center_.offset = bary / double(vertices.size());
  mf.vertices_ = std::move(vertices);
  mf.c_F_ = growth_constant;
  return mf;
}

StateVector Multifunction::center(double, const StateVector& x) const {
  if (kind_ == MultifunctionKind::polytope) return center_.offset;
  if (center_.gain == 0.0) return center_.offset;
  require(x.size() == dim_, "multifunction: state has wrong dimension");
  return center_(x);
}

double Multifunction::radius(double, const StateVector& x) const {
  if (kind_ == MultifunctionKind::polytope) return 0.0;
  return radius_(x);
}

double Multifunction::support(double t, const StateVector& x, const StateVector& d) const {
  require(d.size() == dim_ && d.allFinite(), "support: direction must be finite with matching dimension");
  if (kind_ == MultifunctionKind::polytope) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices_) best = std::max(best, v.dot(d));
    return best;
  }
  return center(t, x).dot(d) + radius(t, x) * d.norm();
}

StateVector Multifunction::support_point(double t, const StateVector& x, const StateVector& d) const {
  require(d.size() == dim_ && d.allFinite(), "support_point: direction must be finite with matching dimension");
  if (kind_ == MultifunctionKind::polytope) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vertices_.size(); ++i)
      if (vertices_[i].dot(d) > vertices_[best].dot(d)) best = i;
    return vertices_[best];
  }
  const double n = d.norm();
  if (n == 0.0) return center(t, x);
  return center(t, x) + (radius(t, x) / n) * d;
}

StateVector Multifunction::project(double t, const StateVector& x, const StateVector& y) const {
  require(y.size() == dim_ && y.allFinite(), "project: point must be finite with matching dimension");
  if (kind_ == MultifunctionKind::polytope) return project_onto_hull(vertices_, y);
  const StateVector m = center(t, x);
  const double r = radius(t, x);
  const StateVector diff = y - m;
  const double n = diff.norm();
  if (n <= r) return y;
  return m + (r / n) * diff;
}

double Multifunction::distance(double t, const StateVector& x, const StateVector& y) const {
  if (kind_ != MultifunctionKind::polytope)
    return std::max(0.0, (y - center(t, x)).norm() - radius(t, x));
  return (project(t, x, y) - y).norm();
}

double Multifunction::bound(double t, const StateVector& x) const {
  if (kind_ == MultifunctionKind::polytope) {
    double best = 0.0;
    for (const auto& v : vertices_) best = std::max(best, v.norm());
    return best;
  }
  return center(t, x).norm() + radius(t, x);
}

std::vector<StateVector> Multifunction::extreme_points(double t, const StateVector& x) const {
  if (kind_ == MultifunctionKind::polytope) return vertices_;
  const StateVector m = center(t, x);
  const double r = radius(t, x);
  std::vector<StateVector> out;
  out.reserve(2 * static_cast<std::size_t>(dim_));
  for (int k = 0; k < dim_; ++k) {
    StateVector e = m;
    e(k) += r;
    out.push_back(e);
    e(k) -= 2.0 * r;
    out.push_back(e);
  }
  return out;
}

StateVector Multifunction::point_from_coordinates(double t, const StateVector& x, const StateVector& w) const {
  if (kind_ == MultifunctionKind::polytope) {
    require(w.size() == static_cast<Eigen::Index>(vertices_.size()), "point_from_coordinates: need one weight per vertex");
    require((w.array() >= 0.0).all() && std::abs(w.sum() - 1.0) < 1e-12,
            "point_from_coordinates: weights must lie in the simplex");
    StateVector out = StateVector::Zero(dim_);
    for (std::size_t i = 0; i < vertices_.size(); ++i) out += w(static_cast<Eigen::Index>(i)) * vertices_[i];
    return out;
  }
  require(w.size() == dim_ && w.norm() <= 1.0 + 1e-12, "point_from_coordinates: need |w| <= 1");
  return center(t, x) + radius(t, x) * w;
}

// ---------------------------------------------------------------------------

InflatedSet::InflatedSet(MultifunctionPtr base, double t0, StateVector x0, double epsilon)
    : base_(std::move(base)), t0_(t0), x0_(std::move(x0)), epsilon_(epsilon) {
  require(base_ != nullptr, "InflatedSet: base multifunction required");
  require(epsilon_ >= 0.0 && std::isfinite(epsilon_), "InflatedSet: epsilon must be finite and >= 0");
}

double InflatedSet::support(const StateVector& d) const { return base_->support(t0_, x0_, d) + epsilon_ * d.norm(); }

StateVector InflatedSet::support_point(const StateVector& d) const {
  const double n = d.norm();
  StateVector p = base_->support_point(t0_, x0_, d);
  if (n > 0.0) p += (epsilon_ / n) * d;
  return p;
}

StateVector InflatedSet::project(const StateVector& y) const {
  const StateVector p = base_->project(t0_, x0_, y);
  const StateVector diff = y - p;
  const double n = diff.norm();
  if (n <= epsilon_) return y;
  return p + (epsilon_ / n) * diff;
}

double InflatedSet::distance(const StateVector& y) const {
  return std::max(0.0, base_->distance(t0_, x0_, y) - epsilon_);
}

bool InflatedSet::contains(const StateVector& y, double tolerance) const { return distance(y) <= tolerance; }

// ---------------------------------------------------------------------------

StateVector project_onto_hull(const std::vector<StateVector>& points, const StateVector& y) {
  require(!points.empty(), "project_onto_hull: need at least one point");
  const auto m = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dim = y.size();
  Eigen::MatrixXd P(dim, m);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    require(points[static_cast<std::size_t>(i)].size() == dim, "project_onto_hull: dimension mismatch");
    P.col(i) = points[static_cast<std::size_t>(i)] - y;
    scale = std::max(scale, P.col(i).squaredNorm());
  }
  const double eps = 1e-14 * std::max(1.0, scale);

  std::vector<Eigen::Index> active;
  Eigen::VectorXd w;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i < m; ++i)
    if (P.col(i).squaredNorm() < P.col(start).squaredNorm()) start = i;
  active.push_back(start);
  w = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd z = P.col(start);

  for (int major = 0; major < 10 * m + 50; ++major) {
    Eigen::Index j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = z.dot(P.col(i));
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (z.squaredNorm() - best <= eps) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    w.conservativeResize(static_cast<Eigen::Index>(active.size()));
    w(w.size() - 1) = 0.0;

    for (int minor = 0; minor < 10 * m + 50; ++minor) {
      const auto s = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd Q(dim, s);
      for (Eigen::Index k = 0; k < s; ++k) Q.col(k) = P.col(active[static_cast<std::size_t>(k)]);
      // Affine minimum-norm point: [QᵀQ 1; 1ᵀ 0][a; μ] = [0; 1].
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
      kkt.topLeftCorner(s, s) = Q.transpose() * Q;
      kkt.topRightCorner(s, 1).setOnes();
      kkt.bottomLeftCorner(1, s).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs(s) = 1.0;
      const Eigen::VectorXd a = kkt.completeOrthogonalDecomposition().solve(rhs).head(s);
      if ((a.array() > 1e-15).all()) {
        w = a;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index k = 0; k < s; ++k)
        if (a(k) <= 1e-15 && w(k) - a(k) > 0.0) theta = std::min(theta, w(k) / (w(k) - a(k)));
      w = theta * a + (1.0 - theta) * w;
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_w;
      for (Eigen::Index k = 0; k < s; ++k) {
        if (w(k) > 1e-15) {
          kept.push_back(active[static_cast<std::size_t>(k)]);
          kept_w.push_back(w(k));
        }
      }
      active = kept;
      w = Eigen::Map<Eigen::VectorXd>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
      w /= w.sum();
    }
    z.setZero();
    for (std::size_t k = 0; k < active.size(); ++k) z += w(static_cast<Eigen::Index>(k)) * P.col(active[k]);
  }
  return y + z;
}

HypothesisReport check_linear_growth(const Multifunction& mf, HypothesisSampler& sampler, int n_samples,
                                     double tolerance) {
  require(n_samples >= 1, "check_linear_growth: n_samples must be >= 1");
  require(sampler.triple().dim() == mf.dim(), "check_linear_growth: sampler dimension mismatch");
  HypothesisReport report;
  report.hypothesis = "linear_growth";
  for (int i = 0; i < n_samples; ++i) {
    const SamplePoint s = sampler.next();
    const double lhs = mf.bound(s.t, s.x);
    const double rhs = mf.growth_constant() * (1.0 + s.x.norm());
    Witness w;
    w.scalars = {{"t", s.t}, {"lhs", lhs}, {"rhs", rhs}};
    w.vectors["x"] = std::vector<double>(s.x.data(), s.x.data() + s.x.size());
    report.record(margin_le(lhs, rhs), tolerance, w);
  }
  return report;
}

namespace {

/// e(F(s,y), F(t,x)) = sup_{f ∈ F(s,y)} dist(f, F(t,x)).
double hausdorff_excess(const Multifunction& mf, double s, const StateVector& y, double t, const StateVector& x) {
  if (mf.kind() == MultifunctionKind::polytope) return 0.0;  // vertices do not move
  const double gap = (mf.center(s, y) - mf.center(t, x)).norm();
  return std::max(0.0, gap + mf.radius(s, y) - mf.radius(t, x));
}

}  // namespace

HypothesisReport check_usc(const Multifunction& mf, double t, const StateVector& x,
                           const std::vector<double>& probe_radii, std::uint64_t seed, int samples_per_radius,
                           double tolerance) {
  require(!probe_radii.empty(), "check_usc: need at least one probe radius");
  require(x.size() == mf.dim(), "check_usc: state has wrong dimension");
  require(samples_per_radius >= 1, "check_usc: samples_per_radius must be >= 1");
  for (std::size_t i = 0; i < probe_radii.size(); ++i) {
    require(probe_radii[i] > 0.0, "check_usc: probe radii must be positive");
    if (i > 0) require(probe_radii[i] < probe_radii[i - 1], "check_usc: probe radii must decrease");
  }
  Rng rng(seed);
  std::vector<double> excess;
  for (double rho : probe_radii) {
    double worst = 0.0;
    for (int i = 0; i < samples_per_radius; ++i) {
      const double s = t + rng.uniform(-rho, rho);
      const StateVector y = x + sample_h_ball(mf.dim(), rho, rng);
      worst = std::max(worst, hausdorff_excess(mf, s, y, t, x));
    }
    excess.push_back(worst);
  }
  bool non_decreasing = true;
  for (std::size_t i = 1; i < excess.size(); ++i)
    if (excess[i] < excess[i - 1] - tolerance) non_decreasing = false;
  const double last = excess.back();
  const bool flagged = non_decreasing && last > tolerance;

  HypothesisReport report;
  report.hypothesis = "upper_semicontinuity";
  Witness w;
  w.scalars = {{"t", t}, {"final_excess", last}};
  w.vectors["x"] = std::vector<double>(x.data(), x.data() + x.size());
  w.vectors["probe_radii"] = probe_radii;
  w.vectors["excess"] = excess;
  report.record(flagged ? -last / std::max(1.0, last) : 0.0, 0.0, w);
  if (flagged) report.notes.push_back("excess does not decay along the probe sequence");
  return report;
}

}  // namespace inclusion_lab
