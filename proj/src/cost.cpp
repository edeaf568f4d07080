#include "opgg/cost.hpp"

namespace opgg {

void CostWeights::validate() const {
  for (double a : {alpha1, alpha2, alpha3, alpha4}) {
    if (!(a >= 0.0)) throw DomainError("cost weights must be non-negative");
  }
  if (alpha1 + alpha2 + alpha3 + alpha4 <= 0.0) {
    throw DomainError("at least one cost weight must be positive");
  }
  if (!(v_max > 0.0 && v_max <= 1.0)) throw DomainError("v_max must lie in (0, 1]");
  validate_simplex(w_star);
}

double running_cost(const SimplexState& w, double v, const CostWeights& weights) {
  const double vy = v * w(1);
  return 0.5 * (weights.alpha2 * (w - weights.w_star).squaredNorm() + weights.alpha3 * v * v +
                weights.alpha4 * vy * vy);
}

Eigen::VectorXd trapezoid_weights(const TimeGrid& grid) {
  Eigen::VectorXd q = Eigen::VectorXd::Constant(grid.nodes(), grid.dt());
  q(0) *= 0.5;
  q(grid.steps) *= 0.5;
  return q;
}

CostBreakdown evaluate_cost(const StateTrajectory& traj, const ControlTrajectory& control,
                            const CostWeights& weights) {
  if (!(traj.grid == control.grid)) throw GridMismatchError("state and control grids differ");
  if (static_cast<int>(traj.states.size()) != traj.grid.nodes() ||
      control.values.size() != control.grid.nodes()) {
    throw GridMismatchError("trajectory length does not match its grid");
  }

  const Eigen::VectorXd q = trapezoid_weights(traj.grid);
  double tracking = 0.0, effort = 0.0, punished = 0.0, yv_integral = 0.0;
  for (int k = 0; k < traj.grid.nodes(); ++k) {
    const SimplexState& w = traj.states[k];
    const double v = control.values(k);
    const double yv = w(1) * v;
    tracking += q(k) * (w - weights.w_star).squaredNorm();
    effort += q(k) * v * v;
    punished += q(k) * yv * yv;
    yv_integral += q(k) * yv;
  }

  CostBreakdown out;
  out.terminal = 0.5 * weights.alpha1 * (traj.back() - weights.w_star).squaredNorm();
  out.tracking = 0.5 * weights.alpha2 * tracking;
  out.effort = 0.5 * weights.alpha3 * effort;
  out.punished = 0.5 * weights.alpha4 * punished;
  out.total = out.terminal + out.tracking + out.effort + out.punished;
  out.punished_integral = yv_integral;
  return out;
}

}  // namespace opgg
