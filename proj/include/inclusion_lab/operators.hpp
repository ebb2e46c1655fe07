// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_OPERATORS_HPP
#define INCLUSION_LAB_OPERATORS_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "inclusion_lab/gelfand.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/sampling.hpp"
#include "inclusion_lab/sine_grid.hpp"

namespace inclusion_lab {

enum class OperatorKind { heat, burgers, reaction_diffusion, custom };

std::string to_string(OperatorKind kind);

/// Operator A : [0, T] × V → V*, split as A(t, x) = D x + N(t, x) with a
/// diagonal stiff part D (treated implicitly by the time stepper) and a
/// remainder N (treated explicitly). Immutable after construction.
class Operator {
 public:
  virtual ~Operator() = default;

  OperatorKind kind() const noexcept { return kind_; }
  const SpectralTriple& triple() const noexcept { return triple_; }

  /// V*-coordinates of A(t, x). Throws EvaluationError on non-finite output.
  StateVector apply(double t, const StateVector& x) const;

  const Eigen::VectorXd& stiff_diagonal() const noexcept { return stiff_; }

  /// N(t, x) = A(t, x) - D x.
  StateVector explicit_part(double t, const StateVector& x) const;

  /// ∂A/∂x; central differences unless overridden.
  virtual Eigen::MatrixXd jacobian(double t, const StateVector& x) const;

  /// True when N ≡ 0, i.e. A is the diagonal map D.
  virtual bool is_diagonal_linear() const { return false; }

  /// Structural constant c₂ with ⟨A x, x⟩ ≥ c₂‖x‖^p for the shipped kinds
  /// (diffusion coefficient); used to seed certificate fitting.
  virtual double coercivity_hint() const = 0;

  /// Exponent α for the growth bound (degree of the nonlinearity minus one).
  virtual double growth_exponent_hint() const = 0;

  /// Named parameters for reports.
  virtual std::map<std::string, double> parameters() const { return {}; }

 protected:
  Operator(OperatorKind kind, SpectralTriple triple, Eigen::VectorXd stiff);
  virtual StateVector evaluate_explicit(double t, const StateVector& x) const = 0;

 private:
  OperatorKind kind_;
  SpectralTriple triple_;
  Eigen::VectorXd stiff_;
};

using OperatorPtr = std::shared_ptr<const Operator>;

/// A x = κ Λ x (heat equation with diffusivity κ).
OperatorPtr make_heat(const SpectralTriple& triple, double diffusivity = 1.0);

/// A u = -ν u'' + u u' on (0, π) with Dirichlet data. Diffusion acts
/// spectrally; the convection is evaluated on a `grid_points` finite
/// difference grid in the skew-symmetric form (1/3)[(u²)' + u u'], which makes
/// ⟨N(u), u⟩ vanish identically.
OperatorPtr make_burgers(const SpectralTriple& triple, double nu, int grid_points = 64);

/// A u = -Δu + g(u) with g(s) = Σ_i a_i s^i applied pointwise on the grid.
OperatorPtr make_reaction_diffusion(const SpectralTriple& triple, std::vector<double> reaction,
                                    int grid_points = 64);

/// A x = gain(|x|) Λ x with a piecewise-constant gain: entry (from, gain)
/// applies when |x| > from (the first entry applies from 0). Discontinuous
/// at every breakpoint; used as a hemicontinuity counterexample.
OperatorPtr make_gain_table(const SpectralTriple& triple,
                            std::vector<std::pair<double, double>> table);

/// Arbitrary explicit map; optional stiff diagonal.
OperatorPtr make_custom(const SpectralTriple& triple,
                        std::function<StateVector(double, const StateVector&)> explicit_part,
                        Eigen::VectorXd stiff = {}, double coercivity_hint = 0.0,
                        double growth_exponent_hint = 1.0);

// ---------------------------------------------------------------------------
// Hypothesis certificates

/// s(x) = coef · ‖x‖^v_power · |x|^h_power.
struct PowerLaw {
  double coef = 0.0;
  double v_power = 0.0;
  double h_power = 0.0;

  double operator()(const SpectralTriple& triple, const StateVector& x) const;
};

/// Constants of the local monotonicity hypothesis:
///   ⟨A(t,x) - A(t,y), x - y⟩ ≥ -(c₀ + ρ(x) + η(y)) |x - y|²
/// together with ρ(x) + η(x) ≤ |c₀| (1 + ‖x‖^p)(1 + |x|^β).
struct MonotonicityCertificate {
  double c0 = 0.0;
  PowerLaw rho;
  PowerLaw eta;
  double beta = 1.0;
};

/// Constants of the growth and coercivity hypotheses:
///   ‖A(t,x)‖_* ≤ (f^A(t)^{1/q} + c₁‖x‖^{p-1})(1 + |x|^α)
///   ⟨A(t,x), x⟩ ≥ c₂‖x‖^p - c₃|x|² - f^A(t)
struct GrowthCoercivityCertificate {
  double c1 = 0.0;
  double alpha = 0.0;
  double c2 = 1.0;
  double c3 = 0.0;
  std::function<double(double)> fA = [](double) { return 0.0; };
};

struct OperatorCertificates {
  MonotonicityCertificate monotonicity;
  GrowthCoercivityCertificate growth;
};

/// Exact constants of κΛ for p = 2: c₀ = 0, ρ = η = 0, c₁ = c₂ = κ, α = c₃ = 0.
OperatorCertificates heat_certificates(double diffusivity = 1.0);

/// Constant-fitting oracle: maximizes each violated-margin ratio over a
/// sample cloud and multiplies by `safety`. The monotonicity penalty is
/// η(y) = C‖y‖² with c₀ = C so that the growth bound on ρ + η holds; the
/// growth constant uses α from the operator; c₂ is the structural coercivity
/// constant and c₃ absorbs any sampled deficit.
OperatorCertificates fit_certificates(const Operator& op, HypothesisSampler& sampler, int n_samples,
                                      double safety = 2.0);

HypothesisReport check_local_monotonicity(const Operator& op, const MonotonicityCertificate& cert,
                                          HypothesisSampler& sampler, int n_samples,
                                          double tolerance = 1e-12);

HypothesisReport check_growth(const Operator& op, const GrowthCoercivityCertificate& cert,
                              HypothesisSampler& sampler, int n_samples, double tolerance = 1e-12);

HypothesisReport check_coercivity(const Operator& op, const GrowthCoercivityCertificate& cert,
                                  HypothesisSampler& sampler, int n_samples,
                                  double tolerance = 1e-12);

/// Samples s ↦ ⟨A(t, x + s y), v⟩ on `s_grid` ⊂ [0, 1]. Each grid interval is
/// bisected toward its larger half-jump until its width is below 1e-12; a
/// jump that survives bisection above tolerance·(1 + oscillation over the
/// grid) is a discontinuity.
HypothesisReport check_hemicontinuity(const Operator& op, double t, const StateVector& x,
                                      const StateVector& y, const StateVector& v,
                                      const std::vector<double>& s_grid, double tolerance = 1e-6);

/// Evenly spaced s-grid with `n` intervals on [0, 1].
std::vector<double> uniform_s_grid(int n);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_OPERATORS_HPP
