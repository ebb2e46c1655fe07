// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_SINE_GRID_HPP
#define INCLUSION_LAB_SINE_GRID_HPP

#include <Eigen/Dense>

namespace inclusion_lab {

/// Uniform interior grid ξ_j = j·h, h = π/(M+1), on (0, π) with the
/// L²-orthonormal sine modes φ_k(ξ) = sqrt(2/π) sin(kξ), k = 1..N, N ≤ M.
///
/// The discrete inner product (a, b)_h = h Σ a_j b_j makes the sampled modes
/// exactly orthonormal, so analyze(synthesize(c)) == c and
/// (analyze(g), c) == (g, synthesize(c))_h.
class SineGrid {
 public:
  SineGrid(int modes, int points);

  int modes() const noexcept { return static_cast<int>(synthesis_.cols()); }
  int points() const noexcept { return static_cast<int>(synthesis_.rows()); }
  double spacing() const noexcept { return spacing_; }
  double node(int j) const noexcept { return (j + 1) * spacing_; }

  /// Grid values Σ_k c_k φ_k(ξ_j).
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;

  /// Mode coefficients h Σ_j g_j φ_k(ξ_j) (discrete L² projection).
  Eigen::VectorXd analyze(const Eigen::VectorXd& grid_values) const;

 private:
  Eigen::MatrixXd synthesis_;
  double spacing_;
};

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_SINE_GRID_HPP
