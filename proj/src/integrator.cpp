#include "opgg/integrator.hpp"

#include <cmath>
#include <sstream>

namespace opgg {

void TimeGrid::validate() const {
  if (!(std::isfinite(t0) && std::isfinite(tf) && tf > t0)) {
    throw DomainError("time grid requires finite t0 < tf");
  }
  if (steps < 1) throw DomainError("time grid requires steps >= 1");
}

ControlTrajectory ControlTrajectory::constant(const TimeGrid& grid, double v) {
  grid.validate();
  return {grid, Eigen::VectorXd::Constant(grid.nodes(), v)};
}

void ControlTrajectory::validate(double v_max) const {
  grid.validate();
  if (values.size() != grid.nodes()) {
    throw DomainError("control has " + std::to_string(values.size()) + " values for " +
                      std::to_string(grid.nodes()) + " grid nodes");
  }
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (!(values(k) >= 0.0 && values(k) <= v_max)) {
      std::ostringstream msg;
      msg << "control value " << values(k) << " at node " << k << " outside [0, " << v_max << "]";
      throw DomainError(msg.str());
    }
  }
}

SimplexState rk4_step(const SimplexState& w, double v_left, double v_mid, double v_right,
                      double dt, const GameParams& params, StepDiagnostics* diag) {
  if (!(dt > 0.0)) throw DomainError("step size must be positive");
  const Vector3 k1 = replicator(w, v_left, params);
  const Vector3 k2 = replicator<double>(w + 0.5 * dt * k1, v_mid, params);
  const Vector3 k3 = replicator<double>(w + 0.5 * dt * k2, v_mid, params);
  const Vector3 k4 = replicator<double>(w + dt * k3, v_right, params);
  const SimplexState raw = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  const double sum_error = std::abs(raw.sum() - 1.0);
  const double min_component = raw.minCoeff();
  if (!raw.allFinite() || sum_error > kMaxSimplexDrift || min_component < -kMaxSimplexDrift) {
    std::ostringstream msg;
    msg << "RK4 step left the simplex (sum error " << sum_error << ", min component "
        << min_component << "); reduce the step size";
    throw NumericError(msg.str());
  }
  if (diag != nullptr) {
    diag->max_sum_error = std::max(diag->max_sum_error, sum_error);
    diag->min_component = std::min(diag->min_component, min_component);
  }

  const SimplexState clamped = raw.cwiseMax(0.0);
  return clamped / clamped.sum();
}

StateTrajectory integrate_forward(const SimplexState& w0, const ControlTrajectory& control,
                                  const GameParams& params, StepDiagnostics* diag) {
  validate_simplex(w0);
  control.validate();
  const TimeGrid& grid = control.grid;
  const double dt = grid.dt();

  StateTrajectory traj{grid, {}};
  traj.states.reserve(grid.nodes());
  traj.states.push_back(w0);
  for (int k = 0; k < grid.steps; ++k) {
    const double vl = control.values(k);
    const double vr = control.values(k + 1);
    try {
      traj.states.push_back(rk4_step(traj.states.back(), vl, 0.5 * (vl + vr), vr, dt, params, diag));
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(k) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace opgg
