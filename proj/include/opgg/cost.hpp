#pragma once

#include "opgg/integrator.hpp"

namespace opgg {

/// Weights of the four-term objective
///   J = a1/2 |w(tf) - w*|² + ∫ a2/2 |w - w*|² + a3/2 v² + a4/2 (v y)² dt.
struct CostWeights {
  double alpha1 = 0.0;  // terminal state error
  double alpha2 = 0.0;  // tracking error
  double alpha3 = 0.0;  // control effort
  double alpha4 = 0.0;  // punished individuals
  SimplexState w_star = SimplexState(1.0, 0.0, 0.0);
  double v_max = 1.0;

  void validate() const;
  /// True when the Hamiltonian is strictly convex in v on the simplex interior.
  bool strictly_convex() const { return alpha3 > 0.0 || alpha4 > 0.0; }
};

struct CostBreakdown {
  double terminal = 0.0;
  double tracking = 0.0;
  double effort = 0.0;
  double punished = 0.0;
  double total = 0.0;
  double punished_integral = 0.0;  // ∫ y v dt, unweighted
};

/// Integrand of the objective at a single instant.
double running_cost(const SimplexState& w, double v, const CostWeights& weights);

/// Composite trapezoid weights for the grid: dt/2 at the ends, dt inside.
Eigen::VectorXd trapezoid_weights(const TimeGrid& grid);

/// Trapezoid quadrature of the objective on the shared grid.
/// Throws GridMismatchError if the trajectories disagree on the grid.
CostBreakdown evaluate_cost(const StateTrajectory& traj, const ControlTrajectory& control,
                            const CostWeights& weights);

}  // namespace opgg
