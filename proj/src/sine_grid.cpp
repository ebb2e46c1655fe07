// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/sine_grid.hpp"

#include <cmath>
#include <numbers>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

SineGrid::SineGrid(int modes, int points) : spacing_(std::numbers::pi / (points + 1)) {
  require(modes >= 1 && points >= modes, "SineGrid: need 1 <= modes <= points");
  synthesis_.resize(points, modes);
  const double amp = std::sqrt(2.0 / std::numbers::pi);
  for (int j = 0; j < points; ++j)
    for (int k = 0; k < modes; ++k) synthesis_(j, k) = amp * std::sin((k + 1) * node(j));
}

Eigen::VectorXd SineGrid::synthesize(const Eigen::VectorXd& coeffs) const {
  require(coeffs.size() == synthesis_.cols(), "SineGrid::synthesize: dimension mismatch");
  return synthesis_ * coeffs;
}

Eigen::VectorXd SineGrid::analyze(const Eigen::VectorXd& grid_values) const {
  require(grid_values.size() == synthesis_.rows(), "SineGrid::analyze: dimension mismatch");
  return spacing_ * (synthesis_.transpose() * grid_values);
}

}  // namespace inclusion_lab
