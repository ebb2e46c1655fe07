// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_SAMPLING_HPP
#define INCLUSION_LAB_SAMPLING_HPP

#include <cstdint>
#include <functional>
#include <random>

#include "inclusion_lab/gelfand.hpp"

namespace inclusion_lab {

/// Seeded random source threaded explicitly through every sampler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int uniform_int(int lo, int hi);  // inclusive bounds
  StateVector gaussian(int dim);

  /// Uniform direction on the unit sphere of R^dim.
  StateVector unit_direction(int dim);

  /// Independent child stream; used to hand each sample a stable seed.
  std::uint64_t split() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Draws states from a ball of radius `radius` in the V-norm.
///
/// Half of the draws are uniform in the ball (direction uniform in the
/// V-metric, radius ~ R·U^{1/N}); the other half are Gaussian with per-mode
/// standard deviation R/sqrt(N λ_k), rescaled into the ball when they land
/// outside. The mixture puts mass both near the boundary and near zero.
StateVector sample_v_ball(const SpectralTriple& triple, double radius, Rng& rng);

/// Uniform draw from the H-ball of the given radius.
StateVector sample_h_ball(int dim, double radius, Rng& rng);

/// One sample for a two-point hypothesis check.
struct SamplePoint {
  double t = 0.0;
  StateVector x;
  StateVector y;
};

/// Produces (t, x, y) triples with t uniform on [0, T] and x, y from the V-ball.
class HypothesisSampler {
 public:
  HypothesisSampler(const SpectralTriple& triple, double radius, std::uint64_t seed)
      : triple_(triple), radius_(radius), rng_(seed) {}

  SamplePoint next();
  Rng& rng() noexcept { return rng_; }
  double radius() const noexcept { return radius_; }
  const SpectralTriple& triple() const noexcept { return triple_; }

 private:
  SpectralTriple triple_;
  double radius_;
  Rng rng_;
};

/// Worker count from INCLUSION_LAB_WORKERS (default 1, clamped to [1, 64]).
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Each index is
/// visited exactly once; callers write results by index so the outcome is
/// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_SAMPLING_HPP
