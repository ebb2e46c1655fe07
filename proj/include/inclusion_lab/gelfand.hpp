// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_GELFAND_HPP
#define INCLUSION_LAB_GELFAND_HPP

#include <Eigen/Dense>
#include <vector>

namespace inclusion_lab {

/// Coefficients of an element of V, H or V* in the eigenbasis of the triple.
using StateVector = Eigen::VectorXd;

/// Finite Galerkin model of a Gelfand triple V ⊂ H ⊂ V*.
///
/// The basis is orthonormal in H and diagonalizes the V inner product with
/// weights λ_k, so
///
///   |x|    = sqrt(Σ x_k²)          (H)
///   ‖x‖    = sqrt(Σ λ_k x_k²)      (V)
///   ‖x‖_*  = sqrt(Σ x_k² / λ_k)    (V*)
///
/// and the duality pairing coincides with the H inner product on
/// coordinates. The conjugate exponent q is derived from p and never stored.
class SpectralTriple {
 public:
  /// λ_k = k² (Dirichlet Laplacian on (0, π)).
  SpectralTriple(int dim, double p = 2.0, double horizon = 1.0);

  /// Explicit eigenvalues; must be strictly positive and nondecreasing.
  SpectralTriple(std::vector<double> eigenvalues, double p = 2.0, double horizon = 1.0);

  int dim() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  double p() const noexcept { return p_; }
  double q() const noexcept { return p_ / (p_ - 1.0); }
  double horizon() const noexcept { return horizon_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  double lambda(int k) const { return eigenvalues_(k); }
  double lambda_min() const noexcept { return eigenvalues_(0); }
  double lambda_max() const noexcept { return eigenvalues_(eigenvalues_.size() - 1); }

  double h_norm(const StateVector& x) const;
  double v_norm(const StateVector& x) const;
  double vstar_norm(const StateVector& x) const;

  /// ⟨g, v⟩ between V* and V; equals the H inner product on coordinates.
  double pairing(const StateVector& g, const StateVector& v) const;

  StateVector zero() const { return StateVector::Zero(dim()); }
  StateVector unit(int k) const;

  /// Throws ContractViolation unless `x` has length dim() and finite entries.
  void check(const StateVector& x) const;

 private:
  Eigen::VectorXd eigenvalues_;
  double p_;
  double horizon_;
};

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_GELFAND_HPP
