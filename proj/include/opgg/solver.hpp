#pragma once

#include <algorithm>
#include <vector>

#include "opgg/cost.hpp"

namespace opgg {

/// Adjoint trajectory, one 3-vector per grid node.
using Costate = std::vector<Vector3>;

struct SolverConfig {
  int max_iters = 2000;
  double theta = 0.5;              // relaxation of the sweep update
  double tol_cost = 1e-8;          // |ΔJ| <= tol_cost * (1 + |J|)
  double tol_control = 1e-6;       // max |Δv|
  double bang_bang_epsilon = 1e-12;
  double initial_control = 0.5;    // initial guess as a fraction of v_max
  int max_backtracks = 20;

  void validate() const;
};

struct SolveReport {
  ControlTrajectory control;
  StateTrajectory states;
  Costate costate;
  CostBreakdown breakdown;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;
};

// Hamiltonian pieces. H = running_cost + λᵀ f.
double hamiltonian(const SimplexState& w, double v, const Vector3& lambda,
                   const CostWeights& weights, const GameParams& params);
/// ∂H/∂v = a3 v + a4 v y² + λ·f_v.
double hamiltonian_dv(const SimplexState& w, double v, const Vector3& lambda,
                      const CostWeights& weights, const GameParams& params);

/// dλ/dt = -∂H/∂w = -[a2 (w - w*) + a4 v² y e_y + (∂f/∂w)ᵀ λ].
Vector3 costate_rhs(const SimplexState& w, double v, const Vector3& lambda,
                    const CostWeights& weights, const GameParams& params);

/// Minimizer of H over v in [0, v_max]. Falls back to bang-bang when
/// H_vv = a3 + a4 y² is below `bang_bang_epsilon`.
double pointwise_control_update(const SimplexState& w, const Vector3& lambda,
                                const CostWeights& weights, const GameParams& params,
                                double bang_bang_epsilon = 1e-12);

/// RK4 on reversed time from λ(tf) = a1 (w(tf) - w*). Midpoint states come
/// from cubic Hermite interpolation of the forward trajectory.
Costate integrate_costate(const StateTrajectory& states, const ControlTrajectory& control,
                          const CostWeights& weights, const GameParams& params);

/// ∂H/∂v at every node.
Eigen::VectorXd hamiltonian_gradient(const StateTrajectory& states,
                                     const ControlTrajectory& control, const Costate& costate,
                                     const CostWeights& weights, const GameParams& params);

struct DiscreteGradient {
  double cost = 0.0;
  Eigen::VectorXd gradient;  // dJ/dv_k of the discretized objective
  StateTrajectory states;
};

/// Exact gradient of evaluate_cost(integrate_forward(w0, v), v) with respect
/// to the node values v_k, by reverse accumulation through the RK4 steps.
DiscreteGradient discrete_adjoint_gradient(const SimplexState& w0,
                                           const ControlTrajectory& control,
                                           const CostWeights& weights, const GameParams& params);

/// Forward-backward sweep with relaxed pointwise updates and backtracking.
SolveReport fbsm_solve(const SimplexState& w0, const TimeGrid& grid, const CostWeights& weights,
                       const GameParams& params, const SolverConfig& config = {});

/// Projected gradient descent on the node values using the discrete adjoint
/// gradient, scaled by the pointwise curvature of H, with Armijo backtracking.
SolveReport projected_gradient_solve(const SimplexState& w0, const TimeGrid& grid,
                                     const CostWeights& weights, const GameParams& params,
                                     const SolverConfig& config = {});

struct SweepEntry {
  double v;
  CostBreakdown breakdown;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  std::size_t argmin = 0;

  const SweepEntry& best() const { return entries.at(argmin); }
};

/// Cost of each constant punishment fraction in `v_values`.
SweepResult constant_sweep(const SimplexState& w0, const TimeGrid& grid,
                           const CostWeights& weights, const GameParams& params,
                           const std::vector<double>& v_values);

/// `count` equally spaced values covering [0, v_max].
std::vector<double> sweep_values(int count, double v_max);

struct KktResidual {
  double interior = 0.0;       // max |H_v| over nodes strictly inside the box
  double lower = 0.0;          // max(0, -H_v) over nodes at 0
  double upper = 0.0;          // max(0, H_v) over nodes at v_max
  int interior_nodes = 0;
  int lower_nodes = 0;
  int upper_nodes = 0;

  double worst() const { return std::max({interior, lower, upper}); }
};

/// First-order optimality residuals of a control given its costate.
/// Nodes within `active_tol` of a bound count as being on that bound.
KktResidual kkt_residual(const StateTrajectory& states, const ControlTrajectory& control,
                         const Costate& costate, const CostWeights& weights,
                         const GameParams& params, double active_tol = 1e-8);

}  // namespace opgg
