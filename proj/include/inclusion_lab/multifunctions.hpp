// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_MULTIFUNCTIONS_HPP
#define INCLUSION_LAB_MULTIFUNCTIONS_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "inclusion_lab/gelfand.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/sampling.hpp"

namespace inclusion_lab {

enum class MultifunctionKind { centered_ball, affine_ball, polytope };

std::string to_string(MultifunctionKind kind);

/// r(x) = base + slope·|x| + jump·[|x| > step_at].
struct RadiusLaw {
  double base = 0.0;
  double slope = 0.0;
  double jump = 0.0;
  double step_at = std::numeric_limits<double>::infinity();

  double operator()(const StateVector& x) const { return of_norm(x.norm()); }
  double of_norm(double n) const;
  bool is_constant() const noexcept { return slope == 0.0 && jump == 0.0; }
};

/// m(x) = offset + gain·x.
struct CenterLaw {
  StateVector offset;
  double gain = 0.0;

  StateVector operator()(const StateVector& x) const;
};

/// State-dependent convex closed values F(t, x) ⊂ H: a ball B(m(x), r(x)) or
/// the convex hull of a fixed vertex list. Immutable.
class Multifunction {
 public:
  static Multifunction centered_ball(int dim, RadiusLaw radius, double growth_constant);
  static Multifunction affine_ball(CenterLaw center, RadiusLaw radius, double growth_constant);
  static Multifunction polytope(std::vector<StateVector> vertices, double growth_constant);

  MultifunctionKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  bool is_ball() const noexcept { return kind_ != MultifunctionKind::polytope; }
  double growth_constant() const noexcept { return c_F_; }
  const RadiusLaw& radius_law() const noexcept { return radius_; }
  const CenterLaw& center_law() const noexcept { return center_; }
  const std::vector<StateVector>& vertices() const noexcept { return vertices_; }

  /// Ball center (the vertex barycenter for polytopes).
  StateVector center(double t, const StateVector& x) const;
  /// Ball radius; 0 for polytopes.
  double radius(double t, const StateVector& x) const;

  /// sup_{f ∈ F(t,x)} (f, d).
  double support(double t, const StateVector& x, const StateVector& d) const;
  /// A maximizer of (f, d) over F(t,x); the center when d = 0.
  StateVector support_point(double t, const StateVector& x, const StateVector& d) const;
  /// Nearest point of F(t,x) to y.
  StateVector project(double t, const StateVector& x, const StateVector& y) const;
  double distance(double t, const StateVector& x, const StateVector& y) const;
  /// sup_{f ∈ F(t,x)} |f|.
  double bound(double t, const StateVector& x) const;
  /// Vertices, or m ± r e_k for balls.
  std::vector<StateVector> extreme_points(double t, const StateVector& x) const;
  /// Maps w with |w| ≤ 1 (balls) or simplex weights (polytopes) into F(t,x).
  StateVector point_from_coordinates(double t, const StateVector& x, const StateVector& w) const;

 private:
  Multifunction() = default;

  MultifunctionKind kind_ = MultifunctionKind::centered_ball;
  int dim_ = 0;
  RadiusLaw radius_;
  CenterLaw center_;
  std::vector<StateVector> vertices_;
  double c_F_ = 0.0;
};

using MultifunctionPtr = std::shared_ptr<const Multifunction>;

/// Minkowski inflation E + B(0, ε) of the value E = F(t₀, x₀).
class InflatedSet {
 public:
  InflatedSet(MultifunctionPtr base, double t0, StateVector x0, double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  double support(const StateVector& d) const;
  StateVector support_point(const StateVector& d) const;
  StateVector project(const StateVector& y) const;
  double distance(const StateVector& y) const;
  bool contains(const StateVector& y, double tolerance = 1e-9) const;

 private:
  MultifunctionPtr base_;
  double t0_;
  StateVector x0_;
  double epsilon_;
};

/// Nearest point of conv(points) to y (Wolfe's minimum-norm-point method).
StateVector project_onto_hull(const std::vector<StateVector>& points, const StateVector& y);

/// Checks |F(t,x)| ≤ c_F (1 + |x|) on sampled (t, x).
HypothesisReport check_linear_growth(const Multifunction& mf, HypothesisSampler& sampler, int n_samples,
                                     double tolerance = 1e-12);

/// Sampled upper-semicontinuity falsifier at (t, x). For each probe radius ρ
/// the Hausdorff excess sup_{(s,y)} e(F(s,y), F(t,x)) is maximized over
/// samples with |s - t| ≤ ρ, |y - x| ≤ ρ. The check fails when the excess
/// does not decrease along the probe sequence and stays above `tolerance`.
/// The witness carries the vectors `probe_radii` and `excess`.
HypothesisReport check_usc(const Multifunction& mf, double t, const StateVector& x,
                           const std::vector<double>& probe_radii, std::uint64_t seed,
                           int samples_per_radius = 256, double tolerance = 1e-9);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_MULTIFUNCTIONS_HPP
