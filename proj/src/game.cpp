#include "opgg/game.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace opgg {

void GameParams::validate() const {
  if (n < 2) throw DomainError("group size n must be >= 2, got " + std::to_string(n));
  if (!(r > 1.0 && r < n)) {
    std::ostringstream msg;
    msg << "multiplication factor r must satisfy 1 < r < n, got r=" << r << ", n=" << n;
    throw DomainError(msg.str());
  }
  if (!(sigma > 0.0 && sigma < r - 1.0)) {
    std::ostringstream msg;
    msg << "loner payoff sigma must satisfy 0 < sigma < r - 1, got sigma=" << sigma;
    throw DomainError(msg.str());
  }
}

void validate_simplex(const SimplexState& w, double tol) {
  if (!w.allFinite()) throw DomainError("simplex state has non-finite components");
  if (w.minCoeff() < -tol) throw DomainError("simplex state has a negative component");
  if (std::abs(w.sum() - 1.0) > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "simplex state components sum to " << w.sum() << ", expected 1";
    throw DomainError(msg.str());
  }
}

void validate_punishment(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << "punishment fraction must lie in [0, 1], got " << v;
    throw DomainError(msg.str());
  }
}

PolyCoefficients helper_ab(double z, int n) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z must lie in [0, 1]");
  if (n < 2) throw DomainError("group size n must be >= 2");
  const auto [a, b] = poly_ab(z, n);
  return {a, b};
}

PayoffVector<double> expected_payoffs(const SimplexState& w, double v, const GameParams& params) {
  validate_simplex(w);
  validate_punishment(v);
  params.validate();
  return payoffs(w, v, params);
}

double group_payoff(Strategy strategy, int n_c, int n_d, double v, const GameParams& params) {
  validate_punishment(v);
  if (strategy == Strategy::Loner) return params.sigma;
  if (n_c < 0 || n_d < 0 || n_c + n_d > params.n) {
    throw DomainError("group counts must be non-negative and total at most n");
  }
  if ((strategy == Strategy::Cooperator && n_c < 1) || (strategy == Strategy::Defector && n_d < 1)) {
    throw DomainError("group counts must include the focal player");
  }
  const int s = n_c + n_d;
  if (s == 1) return params.sigma;
  const double share = params.r * n_c / s;
  if (strategy == Strategy::Cooperator) return share - 1.0;
  // Punished defectors receive 0; the rest keep their share.
  return (1.0 - v) * share;
}

double expected_payoff_bruteforce(const SimplexState& w, double v, const GameParams& params,
                                  Strategy strategy) {
  if (params.n > kBruteForceMaxGroup) {
    throw ResourceError("brute-force enumeration is capped at n = " +
                        std::to_string(kBruteForceMaxGroup));
  }
  validate_simplex(w);
  const int m = params.n - 1;

  // Pascal's triangle up to m; exact in double for m < 20.
  std::vector<std::vector<double>> binom(m + 1, std::vector<double>(m + 1, 0.0));
  for (int i = 0; i <= m; ++i) {
    binom[i][0] = 1.0;
    for (int j = 1; j <= i; ++j) binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0.0);
  }

  double total = 0.0;
  for (int c = 0; c <= m; ++c) {
    for (int d = 0; c + d <= m; ++d) {
      const int l = m - c - d;
      const double prob = binom[m][c] * binom[m - c][d] * std::pow(w(0), c) *
                          std::pow(w(1), d) * std::pow(w(2), l);
      if (prob == 0.0) continue;
      const int focal_c = strategy == Strategy::Cooperator ? 1 : 0;
      const int focal_d = strategy == Strategy::Defector ? 1 : 0;
      total += prob * group_payoff(strategy, c + focal_c, d + focal_d, v, params);
    }
  }
  return total;
}

Vector3 vector_field(const SimplexState& w, double v, const GameParams& params) {
  validate_simplex(w);
  validate_punishment(v);
  return replicator(w, v, params);
}

Matrix3 vector_field_jacobian(const SimplexState& w, double v, const GameParams& params) {
  validate_punishment(v);
  return replicator_jacobian(w, v, params);
}

Vector3 control_sensitivity(const SimplexState& w, const GameParams& params) {
  return replicator_control_sensitivity(w, params);
}

double critical_punishment(const GameParams& params) {
  params.validate();
  const double n = params.n;
  // One division of an exact difference, rather than 1 - ratio, keeps
  // rational thresholds such as 1/6 correctly rounded.
  const double denom = params.r * (n - 1.0);
  const double vc = (denom - n * (params.r - 1.0)) / denom;
  return std::clamp(vc, 0.0, 1.0);
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Cooperator:
      return "cooperator";
    case Strategy::Defector:
      return "defector";
    case Strategy::Loner:
      return "loner";
  }
  return "unknown";
}

}  // namespace opgg
