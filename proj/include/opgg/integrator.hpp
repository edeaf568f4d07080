#pragma once

#include <vector>

#include "opgg/game.hpp"

namespace opgg {

/// Uniform grid t_k = t0 + k (tf - t0) / steps, k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double tf = 1.0;
  int steps = 1;

  void validate() const;
  int nodes() const { return steps + 1; }
  double dt() const { return (tf - t0) / steps; }
  double time(int k) const { return t0 + k * dt(); }
  bool operator==(const TimeGrid&) const = default;
};

/// Node values of a piecewise-linear punishment schedule.
struct ControlTrajectory {
  TimeGrid grid;
  Eigen::VectorXd values;

  static ControlTrajectory constant(const TimeGrid& grid, double v);
  /// Throws DomainError unless values has one entry per node, each in [0, v_max].
  void validate(double v_max = 1.0) const;
};

struct StateTrajectory {
  TimeGrid grid;
  std::vector<SimplexState> states;

  const SimplexState& front() const { return states.front(); }
  const SimplexState& back() const { return states.back(); }
};

/// Drift statistics collected before renormalization.
struct StepDiagnostics {
  double max_sum_error = 0.0;    // max |x + y + z - 1|
  double min_component = 0.0;    // most negative raw component seen
};

inline constexpr double kMaxSimplexDrift = 1e-6;

/// One classical RK4 step of the replicator system with the control sampled
/// at the left end, midpoint and right end of the step. The raw result is
/// clamped at zero and rescaled onto the simplex. Throws NumericError if
/// the raw result drifts more than kMaxSimplexDrift from the simplex.
SimplexState rk4_step(const SimplexState& w, double v_left, double v_mid, double v_right,
                      double dt, const GameParams& params, StepDiagnostics* diag = nullptr);

/// Integrates from w0 over control.grid; node k of the result sits at t_k.
StateTrajectory integrate_forward(const SimplexState& w0, const ControlTrajectory& control,
                                  const GameParams& params, StepDiagnostics* diag = nullptr);

/// Cubic Hermite midpoint of a step from the node states and their slopes.
inline SimplexState hermite_midpoint(const SimplexState& left, const Vector3& f_left,
                                     const SimplexState& right, const Vector3& f_right,
                                     double dt) {
  return 0.5 * (left + right) + (dt / 8.0) * (f_left - f_right);
}

}  // namespace opgg
