#pragma once

// Optional public goods game with fractional punishment of defectors.
//
// State is a point w = (x, y, z) on the 2-simplex: cooperators, defectors
// (free-riders) and loners. Payoff and dynamics functions are templated on
// the scalar type; everything downstream instantiates them with double.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "opgg/errors.hpp"

namespace opgg {

template <typename Scalar>
using Simplex = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Jacobian3 = Eigen::Matrix<Scalar, 3, 3>;

using SimplexState = Simplex<double>;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline constexpr double kSimplexTolerance = 1e-12;

enum class Strategy { Cooperator, Defector, Loner };

struct GameParams {
  int n = 5;           // invited group size
  double r = 3.0;      // multiplication factor of the common pool
  double sigma = 1.0;  // loner payoff

  /// Throws DomainError unless n >= 2, 1 < r < n and 0 < sigma < r - 1.
  void validate() const;
};

template <typename Scalar>
struct PayoffVector {
  Scalar p_x;
  Scalar p_y;
  Scalar p_z;
  Scalar p_bar;
};

struct PolyCoefficients {
  double a;
  double b;
};

/// Throws DomainError if any component is negative or the sum is off by
/// more than `tol`.
void validate_simplex(const SimplexState& w, double tol = kSimplexTolerance);

/// Throws DomainError unless 0 <= v <= 1.
void validate_punishment(double v);

// a = (1/n) sum_{k<n} z^k, b = (1/n) sum_{k<n-1} (n-1-k) z^k. Evaluated by
// Horner's rule so z = 1 is a regular point.
template <typename Scalar>
std::array<Scalar, 2> poly_ab(const Scalar& z, int n) {
  Scalar a(0), b(0);
  for (int k = n - 1; k >= 0; --k) a = a * z + Scalar(1);
  for (int k = n - 2; k >= 0; --k) b = b * z + Scalar(n - 1 - k);
  return {a / Scalar(n), b / Scalar(n)};
}

// d/dz of (a, b).
template <typename Scalar>
std::array<Scalar, 2> poly_ab_derivative(const Scalar& z, int n) {
  Scalar da(0), db(0);
  for (int k = n - 1; k >= 1; --k) da = da * z + Scalar(k);
  for (int k = n - 2; k >= 1; --k) db = db * z + Scalar(k * (n - 1 - k));
  return {da / Scalar(n), db / Scalar(n)};
}

/// Checked entry point for the polynomial coefficients a(z), b(z).
PolyCoefficients helper_ab(double z, int n);

template <typename Scalar>
Scalar pow_int(const Scalar& base, int exponent) {
  Scalar out(1);
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

/// Expected payoffs under punishment fraction v. No validation; see
/// expected_payoffs() for the checked double version.
template <typename Scalar>
PayoffVector<Scalar> payoffs(const Simplex<Scalar>& w, const Scalar& v, const GameParams& params) {
  const Scalar& x = w(0);
  const Scalar& y = w(1);
  const Scalar& z = w(2);
  const auto [a, b] = poly_ab(z, params.n);
  const Scalar r(params.r);
  const Scalar sigma(params.sigma);
  const Scalar zn1 = pow_int(z, params.n - 1);

  PayoffVector<Scalar> p;
  p.p_x = sigma * zn1 + r * a + r * x * b + (Scalar(1) - r) * zn1 - Scalar(1);
  p.p_y = sigma * zn1 + (Scalar(1) - v) * r * x * b;
  p.p_z = sigma;
  p.p_bar = x * p.p_x + y * p.p_y + z * p.p_z;
  return p;
}

/// Replicator right-hand side (x(p_x - p̄), y(p_y - p̄), z(p_z - p̄)).
template <typename Scalar>
Simplex<Scalar> replicator(const Simplex<Scalar>& w, const Scalar& v, const GameParams& params) {
  const auto p = payoffs(w, v, params);
  return Simplex<Scalar>(w(0) * (p.p_x - p.p_bar), w(1) * (p.p_y - p.p_bar),
                         w(2) * (p.p_z - p.p_bar));
}

/// Analytic ∂f/∂w with (x, y, z) treated as independent coordinates.
template <typename Scalar>
Jacobian3<Scalar> replicator_jacobian(const Simplex<Scalar>& w, const Scalar& v,
                                      const GameParams& params) {
  const Scalar& x = w(0);
  const Scalar& z = w(2);
  const int n = params.n;
  const Scalar r(params.r);
  const Scalar sigma(params.sigma);
  const auto [a, b] = poly_ab(z, n);
  const auto [da, db] = poly_ab_derivative(z, n);
  const Scalar dzn1 = Scalar(n - 1) * pow_int(z, n - 2);
  const auto p = payoffs(w, v, params);

  // Payoff gradients; p_x and p_y depend on (x, z) only, p_z is constant.
  Jacobian3<Scalar> dp = Jacobian3<Scalar>::Zero();
  dp(0, 0) = r * b;
  dp(0, 2) = sigma * dzn1 + r * da + r * x * db + (Scalar(1) - r) * dzn1;
  dp(1, 0) = (Scalar(1) - v) * r * b;
  dp(1, 2) = sigma * dzn1 + (Scalar(1) - v) * r * x * db;

  const Simplex<Scalar> pi(p.p_x, p.p_y, p.p_z);
  const Eigen::Matrix<Scalar, 1, 3> dpbar = w.transpose() * dp + pi.transpose();

  Jacobian3<Scalar> jac;
  for (int i = 0; i < 3; ++i) {
    jac.row(i) = w(i) * (dp.row(i) - dpbar);
    jac(i, i) += pi(i) - p.p_bar;
  }
  return jac;
}

/// ∂f/∂v = (r x² y b, -r x y b (1 - y), r x y z b).
template <typename Scalar>
Simplex<Scalar> replicator_control_sensitivity(const Simplex<Scalar>& w, const GameParams& params) {
  const Scalar& x = w(0);
  const Scalar& y = w(1);
  const Scalar& z = w(2);
  const Scalar b = poly_ab(z, params.n)[1];
  const Scalar rxyb = Scalar(params.r) * x * y * b;
  return Simplex<Scalar>(rxyb * x, -rxyb * (Scalar(1) - y), rxyb * z);
}

// Checked double-precision API.

PayoffVector<double> expected_payoffs(const SimplexState& w, double v, const GameParams& params);

/// Payoff of a focal player in a group with n_c cooperators and n_d
/// defectors, the focal player included. A lone participant gets sigma.
double group_payoff(Strategy strategy, int n_c, int n_d, double v, const GameParams& params);

inline constexpr int kBruteForceMaxGroup = 20;

/// Exact expectation of group_payoff over the multinomial distribution of
/// the n - 1 co-players. Throws ResourceError for n > kBruteForceMaxGroup.
double expected_payoff_bruteforce(const SimplexState& w, double v, const GameParams& params,
                                  Strategy strategy);

Vector3 vector_field(const SimplexState& w, double v, const GameParams& params);
Matrix3 vector_field_jacobian(const SimplexState& w, double v, const GameParams& params);
Vector3 control_sensitivity(const SimplexState& w, const GameParams& params);

/// Smallest constant punishment fraction at which full cooperation is
/// stable against invading defectors: 1 - n(r-1)/(r(n-1)), clamped to [0,1].
double critical_punishment(const GameParams& params);

std::string to_string(Strategy strategy);

}  // namespace opgg
