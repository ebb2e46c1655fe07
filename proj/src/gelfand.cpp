// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/gelfand.hpp"

#include <cmath>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

namespace {

std::vector<double> k_squared(int dim) {
  require(dim >= 1, "SpectralTriple: dim must be positive");
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) out[static_cast<std::size_t>(k)] = double(k + 1) * double(k + 1);
  return out;
}

}  // namespace

SpectralTriple::SpectralTriple(int dim, double p, double horizon)
    : SpectralTriple(k_squared(dim), p, horizon) {}

SpectralTriple::SpectralTriple(std::vector<double> eigenvalues, double p, double horizon)
    : eigenvalues_(Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(),
                                                     static_cast<Eigen::Index>(eigenvalues.size()))),
      p_(p),
      horizon_(horizon) {
  require(!eigenvalues.empty(), "SpectralTriple: at least one eigenvalue required");
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    require(std::isfinite(eigenvalues[k]) && eigenvalues[k] > 0.0,
            "SpectralTriple: eigenvalues must be finite and strictly positive");
    if (k > 0)
      require(eigenvalues[k] >= eigenvalues[k - 1], "SpectralTriple: eigenvalues must be nondecreasing");
  }
  require(std::isfinite(p) && p >= 2.0, "SpectralTriple: p must be >= 2");
  require(std::isfinite(horizon) && horizon > 0.0, "SpectralTriple: horizon must be positive");
}

void SpectralTriple::check(const StateVector& x) const {
  if (x.size() != eigenvalues_.size()) throw ContractViolation("dimension mismatch with spectral triple");
  if (!x.allFinite()) throw ContractViolation("state vector has non-finite entries");
}

double SpectralTriple::h_norm(const StateVector& x) const {
  check(x);
  return x.norm();
}

double SpectralTriple::v_norm(const StateVector& x) const {
  check(x);
  return std::sqrt((eigenvalues_.array() * x.array().square()).sum());
}

double SpectralTriple::vstar_norm(const StateVector& x) const {
  check(x);
  return std::sqrt((x.array().square() / eigenvalues_.array()).sum());
}

double SpectralTriple::pairing(const StateVector& g, const StateVector& v) const {
  check(g);
  check(v);
  return g.dot(v);
}

StateVector SpectralTriple::unit(int k) const {
  require(k >= 0 && k < dim(), "SpectralTriple::unit: index out of range");
  StateVector e = zero();
  e(k) = 1.0;
  return e;
}

}  // namespace inclusion_lab
