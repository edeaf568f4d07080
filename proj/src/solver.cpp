#include "opgg/solver.hpp"

#include <cmath>
#include <limits>

namespace opgg {

void SolverConfig::validate() const {
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
  if (!(tol_cost > 0.0 && tol_control > 0.0 && bang_bang_epsilon > 0.0)) {
    throw DomainError("solver tolerances must be positive");
  }
  if (!(initial_control >= 0.0 && initial_control <= 1.0)) {
    throw DomainError("initial_control must lie in [0, 1]");
  }
  if (max_backtracks < 0) throw DomainError("max_backtracks must be non-negative");
}

double hamiltonian(const SimplexState& w, double v, const Vector3& lambda,
                   const CostWeights& weights, const GameParams& params) {
  return running_cost(w, v, weights) + lambda.dot(replicator(w, v, params));
}

double hamiltonian_dv(const SimplexState& w, double v, const Vector3& lambda,
                      const CostWeights& weights, const GameParams& params) {
  const double y = w(1);
  return weights.alpha3 * v + weights.alpha4 * v * y * y +
         lambda.dot(replicator_control_sensitivity(w, params));
}

Vector3 costate_rhs(const SimplexState& w, double v, const Vector3& lambda,
                    const CostWeights& weights, const GameParams& params) {
  Vector3 dl = weights.alpha2 * (w - weights.w_star);
  dl(1) += weights.alpha4 * v * v * w(1);
  dl.noalias() += replicator_jacobian(w, v, params).transpose() * lambda;
  return -dl;
}

double pointwise_control_update(const SimplexState& w, const Vector3& lambda,
                                const CostWeights& weights, const GameParams& params,
                                double bang_bang_epsilon) {
  const double y = w(1);
  const double curvature = weights.alpha3 + weights.alpha4 * y * y;
  const double slope = lambda.dot(replicator_control_sensitivity(w, params));
  if (curvature > bang_bang_epsilon) {
    return std::clamp(-slope / curvature, 0.0, weights.v_max);
  }
  return slope < 0.0 ? weights.v_max : 0.0;
}

Costate integrate_costate(const StateTrajectory& states, const ControlTrajectory& control,
                          const CostWeights& weights, const GameParams& params) {
  if (!(states.grid == control.grid)) throw GridMismatchError("state and control grids differ");
  const TimeGrid& grid = states.grid;
  const int last = grid.steps;
  const double h = -grid.dt();

  Costate lambda(grid.nodes());
  lambda[last] = weights.alpha1 * (states.states[last] - weights.w_star);

  Vector3 f_right = replicator(states.states[last], control.values(last), params);
  for (int k = last; k > 0; --k) {
    const SimplexState& w_r = states.states[k];
    const SimplexState& w_l = states.states[k - 1];
    const double v_r = control.values(k);
    const double v_l = control.values(k - 1);
    const double v_m = 0.5 * (v_l + v_r);
    const Vector3 f_left = replicator(w_l, v_l, params);
    const SimplexState w_m = hermite_midpoint(w_l, f_left, w_r, f_right, grid.dt());

    const Vector3& l = lambda[k];
    const Vector3 k1 = costate_rhs(w_r, v_r, l, weights, params);
    const Vector3 k2 = costate_rhs(w_m, v_m, l + 0.5 * h * k1, weights, params);
    const Vector3 k3 = costate_rhs(w_m, v_m, l + 0.5 * h * k2, weights, params);
    const Vector3 k4 = costate_rhs(w_l, v_l, l + h * k3, weights, params);
    lambda[k - 1] = l + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    f_right = f_left;
  }
  return lambda;
}

Eigen::VectorXd hamiltonian_gradient(const StateTrajectory& states,
                                     const ControlTrajectory& control, const Costate& costate,
                                     const CostWeights& weights, const GameParams& params) {
  Eigen::VectorXd hv(states.grid.nodes());
  for (int k = 0; k < states.grid.nodes(); ++k) {
    hv(k) = hamiltonian_dv(states.states[k], control.values(k), costate[k], weights, params);
  }
  return hv;
}

namespace {

// Derivatives of one RK4 step output with respect to (w, v_left, v_right).
struct StepSensitivity {
  Matrix3 dw;
  Vector3 dv_left;
  Vector3 dv_right;
};

using Tangent = Eigen::Matrix<double, 3, 5>;  // columns: w (3), v_left, v_right

StepSensitivity step_sensitivity(const SimplexState& w, double vl, double vr, double dt,
                                 const GameParams& params) {
  const double vm = 0.5 * (vl + vr);
  Eigen::Matrix<double, 1, 5> e_vl = Eigen::Matrix<double, 1, 5>::Zero();
  Eigen::Matrix<double, 1, 5> e_vr = e_vl;
  e_vl(3) = 1.0;
  e_vr(4) = 1.0;
  const Eigen::Matrix<double, 1, 5> e_vm = 0.5 * (e_vl + e_vr);

  Tangent ds1 = Tangent::Zero();
  ds1.leftCols<3>().setIdentity();

  auto stage = [&](const SimplexState& s, double v, const Tangent& ds,
                   const Eigen::Matrix<double, 1, 5>& e_v, Vector3* k) {
    *k = replicator(s, v, params);
    return Tangent(replicator_jacobian(s, v, params) * ds +
                   replicator_control_sensitivity(s, params) * e_v);
  };

  Vector3 k1, k2, k3, k4;
  const Tangent dk1 = stage(w, vl, ds1, e_vl, &k1);
  const SimplexState s2 = w + 0.5 * dt * k1;
  const Tangent dk2 = stage(s2, vm, ds1 + 0.5 * dt * dk1, e_vm, &k2);
  const SimplexState s3 = w + 0.5 * dt * k2;
  const Tangent dk3 = stage(s3, vm, ds1 + 0.5 * dt * dk2, e_vm, &k3);
  const SimplexState s4 = w + dt * k3;
  const Tangent dk4 = stage(s4, vr, ds1 + dt * dk3, e_vr, &k4);

  const SimplexState raw = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  Tangent draw = ds1 + (dt / 6.0) * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4);

  // Clamp at zero, then rescale onto the simplex: out = c / sum(c).
  for (int i = 0; i < 3; ++i) {
    if (raw(i) < 0.0) draw.row(i).setZero();
  }
  const SimplexState clamped = raw.cwiseMax(0.0);
  const double sum = clamped.sum();
  const SimplexState out = clamped / sum;
  const Tangent dout = (Matrix3::Identity() - out * Vector3::Ones().transpose()) * draw / sum;

  return {dout.leftCols<3>(), dout.col(3), dout.col(4)};
}

struct Evaluation {
  StateTrajectory states;
  CostBreakdown breakdown;
};

Evaluation evaluate(const SimplexState& w0, const ControlTrajectory& control,
                    const CostWeights& weights, const GameParams& params) {
  StateTrajectory states = integrate_forward(w0, control, params);
  CostBreakdown breakdown = evaluate_cost(states, control, weights);
  return {std::move(states), breakdown};
}

// H is flat in v: no curvature and no slope. Any value is a minimizer.
bool singular_node(const SimplexState& w, const Vector3& lambda, const CostWeights& weights,
                   const GameParams& params, double epsilon) {
  const double y = w(1);
  if (weights.alpha3 + weights.alpha4 * y * y > epsilon) return false;
  return std::abs(lambda.dot(replicator_control_sensitivity(w, params))) <= epsilon;
}

bool cost_settled(double previous, double current, double tol) {
  return std::abs(previous - current) <= tol * (1.0 + std::abs(current));
}

void validate_problem(const SimplexState& w0, const TimeGrid& grid, const CostWeights& weights,
                      const GameParams& params, const SolverConfig& config) {
  validate_simplex(w0);
  grid.validate();
  weights.validate();
  params.validate();
  config.validate();
}

// Starting control: the cheapest of v = 0, the configured guess and v = v_max.
// The objective is not convex in the control as a whole, and a poor start can
// leave the iteration at a non-global stationary point.
ControlTrajectory initial_guess(const SimplexState& w0, const TimeGrid& grid,
                                const CostWeights& weights, const GameParams& params,
                                const SolverConfig& config) {
  ControlTrajectory best = ControlTrajectory::constant(grid, config.initial_control * weights.v_max);
  double best_cost = evaluate(w0, best, weights, params).breakdown.total;
  for (double v : {0.0, weights.v_max}) {
    ControlTrajectory candidate = ControlTrajectory::constant(grid, v);
    const double cost = evaluate(w0, candidate, weights, params).breakdown.total;
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  }
  return best;
}

SolveReport make_report(const SimplexState& w0, ControlTrajectory control,
                        const CostWeights& weights, const GameParams& params) {
  SolveReport report;
  Evaluation eval = evaluate(w0, control, weights, params);
  report.control = std::move(control);
  report.states = std::move(eval.states);
  report.breakdown = eval.breakdown;
  report.cost_history.push_back(eval.breakdown.total);
  return report;
}

}  // namespace

DiscreteGradient discrete_adjoint_gradient(const SimplexState& w0,
                                           const ControlTrajectory& control,
                                           const CostWeights& weights, const GameParams& params) {
  DiscreteGradient out;
  out.states = integrate_forward(w0, control, params);
  out.cost = evaluate_cost(out.states, control, weights).total;

  const TimeGrid& grid = control.grid;
  const int last = grid.steps;
  const Eigen::VectorXd q = trapezoid_weights(grid);
  const auto& w = out.states.states;
  const Eigen::VectorXd& v = control.values;

  auto running_dw = [&](int k) {
    Vector3 g = weights.alpha2 * (w[k] - weights.w_star);
    g(1) += weights.alpha4 * v(k) * v(k) * w[k](1);
    return Vector3(q(k) * g);
  };

  out.gradient.resize(grid.nodes());
  for (int k = 0; k <= last; ++k) {
    const double y = w[k](1);
    out.gradient(k) = q(k) * (weights.alpha3 * v(k) + weights.alpha4 * v(k) * y * y);
  }

  // mu holds dJ/dw_{k+1} while processing step k.
  Vector3 mu = running_dw(last) + weights.alpha1 * (w[last] - weights.w_star);
  for (int k = last - 1; k >= 0; --k) {
    const StepSensitivity s = step_sensitivity(w[k], v(k), v(k + 1), grid.dt(), params);
    out.gradient(k) += s.dv_left.dot(mu);
    out.gradient(k + 1) += s.dv_right.dot(mu);
    mu = running_dw(k) + s.dw.transpose() * mu;
  }
  return out;
}

SolveReport fbsm_solve(const SimplexState& w0, const TimeGrid& grid, const CostWeights& weights,
                       const GameParams& params, const SolverConfig& config) {
  validate_problem(w0, grid, weights, params, config);

  SolveReport report =
      make_report(w0, initial_guess(w0, grid, weights, params, config), weights, params);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    report.costate = integrate_costate(report.states, report.control, weights, params);

    const Eigen::VectorXd& current = report.control.values;
    Eigen::VectorXd target(grid.nodes());
    for (int k = 0; k < grid.nodes(); ++k) {
      const SimplexState& w = report.states.states[k];
      target(k) = singular_node(w, report.costate[k], weights, params, config.bang_bang_epsilon)
                      ? current(k)
                      : pointwise_control_update(w, report.costate[k], weights, params,
                                                 config.bang_bang_epsilon);
    }
    const double proposal_gap = (target - current).cwiseAbs().maxCoeff();

    double theta = config.theta;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt, theta *= 0.5) {
      ControlTrajectory candidate{grid, (1.0 - theta) * current + theta * target};
      // Values that land next to a bound the update is aiming for snap onto it.
      for (int k = 0; k < grid.nodes(); ++k) {
        double& c = candidate.values(k);
        if ((target(k) == 0.0 || target(k) == weights.v_max) &&
            std::abs(c - target(k)) < config.tol_control) {
          c = target(k);
        }
        c = std::clamp(c, 0.0, weights.v_max);
      }
      Evaluation eval = evaluate(w0, candidate, weights, params);
      if (eval.breakdown.total <= report.breakdown.total) {
        const double step = (candidate.values - current).cwiseAbs().maxCoeff();
        const bool settled =
            cost_settled(report.breakdown.total, eval.breakdown.total, config.tol_cost);
        report.control = std::move(candidate);
        report.states = std::move(eval.states);
        report.breakdown = eval.breakdown;
        report.cost_history.push_back(eval.breakdown.total);
        report.iterations = iter + 1;
        accepted = true;
        report.converged = settled && step < config.tol_control;
        break;
      }
    }
    if (!accepted) {
      // No descent along the sweep direction; a fixed point is the only
      // acceptable way to stall.
      report.iterations = iter + 1;
      report.converged = proposal_gap < config.tol_control;
      break;
    }
    if (report.converged) break;
  }

  report.costate = integrate_costate(report.states, report.control, weights, params);
  return report;
}

SolveReport projected_gradient_solve(const SimplexState& w0, const TimeGrid& grid,
                                     const CostWeights& weights, const GameParams& params,
                                     const SolverConfig& config) {
  validate_problem(w0, grid, weights, params, config);

  SolveReport report =
      make_report(w0, initial_guess(w0, grid, weights, params, config), weights, params);
  const Eigen::VectorXd q = trapezoid_weights(grid);
  constexpr double kArmijo = 1e-4;
  constexpr double kMinCurvature = 1e-3;
  double step = 1.0;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const DiscreteGradient grad = discrete_adjoint_gradient(w0, report.control, weights, params);

    // Per-node scaling by the curvature of H, with a floor for the
    // degenerate (bang-bang) case.
    Eigen::VectorXd direction(grid.nodes());
    for (int k = 0; k < grid.nodes(); ++k) {
      const double y = report.states.states[k](1);
      const double curvature = std::max(weights.alpha3 + weights.alpha4 * y * y, kMinCurvature);
      direction(k) = -grad.gradient(k) / (q(k) * curvature);
    }

    const Eigen::VectorXd& current = report.control.values;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt, step *= 0.5) {
      ControlTrajectory candidate{grid,
                                  (current + step * direction).cwiseMax(0.0).cwiseMin(weights.v_max)};
      const Eigen::VectorXd delta = candidate.values - current;
      const double decrease = grad.gradient.dot(delta);
      Evaluation eval = evaluate(w0, candidate, weights, params);
      if (eval.breakdown.total <= report.breakdown.total + kArmijo * decrease) {
        const double change = delta.cwiseAbs().maxCoeff();
        const bool settled =
            cost_settled(report.breakdown.total, eval.breakdown.total, config.tol_cost);
        report.control = std::move(candidate);
        report.states = std::move(eval.states);
        report.breakdown = eval.breakdown;
        report.cost_history.push_back(eval.breakdown.total);
        report.iterations = iter + 1;
        report.converged = settled && change < config.tol_control;
        accepted = true;
        step = std::min(2.0 * step, 1e6);
        break;
      }
    }
    if (!accepted) {
      // Projected step vanished: stationary to working precision.
      const Eigen::VectorXd probe =
          (current + direction).cwiseMax(0.0).cwiseMin(weights.v_max) - current;
      report.iterations = iter + 1;
      report.converged = probe.cwiseAbs().maxCoeff() < config.tol_control;
      break;
    }
    if (report.converged) break;
  }

  report.costate = integrate_costate(report.states, report.control, weights, params);
  return report;
}

std::vector<double> sweep_values(int count, double v_max) {
  if (count < 1) throw DomainError("sweep needs at least one point");
  if (count == 1) return {v_max};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = v_max * i / (count - 1);
  return out;
}

SweepResult constant_sweep(const SimplexState& w0, const TimeGrid& grid,
                           const CostWeights& weights, const GameParams& params,
                           const std::vector<double>& v_values) {
  validate_simplex(w0);
  grid.validate();
  weights.validate();
  params.validate();
  if (v_values.empty()) throw DomainError("sweep needs at least one value");

  SweepResult result;
  result.entries.reserve(v_values.size());
  double best = std::numeric_limits<double>::infinity();
  for (double v : v_values) {
    if (!(v >= 0.0 && v <= weights.v_max)) throw DomainError("sweep value outside [0, v_max]");
    const ControlTrajectory control = ControlTrajectory::constant(grid, v);
    const CostBreakdown breakdown =
        evaluate_cost(integrate_forward(w0, control, params), control, weights);
    if (breakdown.total < best) {
      best = breakdown.total;
      result.argmin = result.entries.size();
    }
    result.entries.push_back({v, breakdown});
  }
  return result;
}

KktResidual kkt_residual(const StateTrajectory& states, const ControlTrajectory& control,
                         const Costate& costate, const CostWeights& weights,
                         const GameParams& params, double active_tol) {
  const Eigen::VectorXd hv = hamiltonian_gradient(states, control, costate, weights, params);
  KktResidual out;
  for (int k = 0; k < hv.size(); ++k) {
    const double v = control.values(k);
    if (v <= active_tol) {
      ++out.lower_nodes;
      out.lower = std::max(out.lower, -hv(k));
    } else if (v >= weights.v_max - active_tol) {
      ++out.upper_nodes;
      out.upper = std::max(out.upper, hv(k));
    } else {
      ++out.interior_nodes;
      out.interior = std::max(out.interior, std::abs(hv(k)));
    }
  }
  return out;
}

}  // namespace opgg
