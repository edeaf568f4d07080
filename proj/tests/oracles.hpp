#pragma once

// Test-only reference computations. Nothing here calls the analytic
// derivative or adjoint code paths it is used to check.

#include <Eigen/Core>

#include <random>

#include "opgg/game.hpp"

namespace opgg::testing {

inline const GameParams kBaseParams{5, 3.0, 1.0};

/// Central differences of a vector function R^3 -> R^3.
template <typename Fn>
Matrix3 central_jacobian(Fn&& fn, const Vector3& at, double h = 1e-6) {
  Matrix3 out;
  for (int j = 0; j < 3; ++j) {
    Vector3 plus = at, minus = at;
    plus(j) += h;
    minus(j) -= h;
    out.col(j) = (fn(plus) - fn(minus)) / (2.0 * h);
  }
  return out;
}

/// Central difference of a scalar function of one variable.
template <typename Fn>
auto central_derivative(Fn&& fn, double at, double h = 1e-6) {
  return (fn(at + h) - fn(at - h)) / (2.0 * h);
}

/// Norm-relative error |a - b| / |b|, with an absolute floor on |b|.
template <typename A, typename B>
double relative_error(const A& a, const B& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

inline double relative_error(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

/// Uniform samples from the simplex interior (each component >= margin).
class SimplexSampler {
 public:
  explicit SimplexSampler(unsigned seed, double margin = 0.01) : rng_(seed), margin_(margin) {}

  SimplexState operator()() {
    std::exponential_distribution<double> e(1.0);
    SimplexState w(e(rng_), e(rng_), e(rng_));
    w /= w.sum();
    // Shrink toward the centroid to keep away from faces.
    const double scale = 1.0 - 3.0 * margin_;
    return scale * w + SimplexState::Constant(margin_);
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  double margin_;
};

}  // namespace opgg::testing
