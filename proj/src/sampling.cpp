// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

double Rng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(engine_);
}

StateVector Rng::gaussian(int dim) {
  StateVector v(dim);
  for (int k = 0; k < dim; ++k) v(k) = normal();
  return v;
}

StateVector Rng::unit_direction(int dim) {
  for (;;) {
    StateVector v = gaussian(dim);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

StateVector sample_v_ball(const SpectralTriple& triple, double radius, Rng& rng) {
  require(radius >= 0.0, "sample_v_ball: radius must be nonnegative");
  const int n = triple.dim();
  const Eigen::ArrayXd sqrt_lambda = triple.eigenvalues().array().sqrt();
  if (rng.uniform() < 0.5) {
    // Uniform in the V-ball: work in y = sqrt(λ)·x where the V-ball is Euclidean.
    const StateVector dir = rng.unit_direction(n);
    const double r = radius * std::pow(rng.uniform(), 1.0 / n);
    return (r * dir.array() / sqrt_lambda).matrix();
  }
  StateVector x = rng.gaussian(n);
  x = (x.array() * (radius / std::sqrt(double(n))) / sqrt_lambda).matrix();
  const double vn = triple.v_norm(x);
  if (vn > radius && vn > 0.0) x *= radius / vn;
  return x;
}

StateVector sample_h_ball(int dim, double radius, Rng& rng) {
  const StateVector dir = rng.unit_direction(dim);
  return radius * std::pow(rng.uniform(), 1.0 / dim) * dir;
}

SamplePoint HypothesisSampler::next() {
  SamplePoint s;
  s.t = rng_.uniform(0.0, triple_.horizon());
  s.x = sample_v_ball(triple_, radius_, rng_);
  s.y = sample_v_ball(triple_, radius_, rng_);
  return s;
}

int worker_count() {
  const char* env = std::getenv("INCLUSION_LAB_WORKERS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return std::clamp(n, 1, 64);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(worker_count());
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace inclusion_lab
