// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "opgg/scenario.hpp"
#include "oracles.hpp"

using namespace opgg;
using opgg::testing::kBaseParams;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0.0 && seconds > limit_s) {
    out.pass = false;
    out.detail += (out.detail.empty() ? "" : "; ") +
                  fmt("runtime %.2fs over %.0fs limit", seconds, limit_s);
  }
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %-34s %7.2fs  %s\n", out.pass ? "PASS" : "FAIL", id, title, seconds,
              out.detail.c_str());
  std::fflush(stdout);
}

CostWeights comparison_weights() { return preset("table1").weights; }

const TimeGrid kComparisonGrid{0.0, 20.0, 1200};
const SimplexState kW0(0.2, 0.7, 0.1);

// Shared between the comparison, KKT and cross-solver criteria.
struct ComparisonRun {
  SolveReport fbsm;
  bool ready = false;
};
ComparisonRun comparison;

const SolveReport& comparison_optimum() {
  if (!comparison.ready) {
    comparison.fbsm = fbsm_solve(kW0, kComparisonGrid, comparison_weights(), kBaseParams);
    comparison.ready = true;
  }
  return comparison.fbsm;
}

Outcome payoff_oracle() {
  Outcome out;
  double worst = 0.0;
  for (int n : {2, 3, 5, 8}) {
    const double r = 0.5 * (1.0 + n);
    const GameParams params{n, r, 0.25 * (r - 1.0)};
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; i + j <= 20; ++j) {
        const SimplexState w(i / 20.0, j / 20.0, (20 - i - j) / 20.0);
        for (double v : {0.0, 0.25, 0.5, 1.0}) {
          const auto p = expected_payoffs(w, v, params);
          const double exact[3] = {p.p_x, p.p_y, p.p_z};
          const Strategy order[3] = {Strategy::Cooperator, Strategy::Defector, Strategy::Loner};
          for (int s = 0; s < 3; ++s) {
            const double brute = expected_payoff_bruteforce(w, v, params, order[s]);
            worst = std::max(worst, std::abs(exact[s] - brute));
          }
        }
      }
    }
  }
  out.require(worst <= 1e-12, fmt("max error %.3g", worst));
  if (out.pass) out.detail = fmt("max error %.3g", worst);
  return out;
}

Outcome simplex_invariance() {
  Outcome out;
  StepDiagnostics diag;
  double tangency = 0.0;
  int runs = 0;
  for (const auto& name : preset_names()) {
    const ScenarioConfig c = preset(name);
    std::vector<double> controls{0.0, 0.5 * c.weights.v_max, c.weights.v_max};
    if (c.constant_v) controls.push_back(*c.constant_v);
    for (double v : controls) {
      const auto traj =
          integrate_forward(c.w0, ControlTrajectory::constant(c.grid, v), c.params, &diag);
      for (const auto& w : traj.states) {
        tangency = std::max(tangency, std::abs(vector_field(w, v, c.params).sum()));
      }
      ++runs;
    }
  }
  out.require(diag.max_sum_error <= 1e-9, fmt("drift %.3g", diag.max_sum_error));
  out.require(tangency <= 1e-14, fmt("field sum %.3g", tangency));
  if (out.pass) {
    out.detail = fmt("%g runs, drift %.3g, field sum %.3g", runs, diag.max_sum_error, tangency);
  }
  return out;
}

Outcome derivative_oracles() {
  Outcome out;
  testing::SimplexSampler sample(2024);
  CostWeights weights = comparison_weights();
  weights.alpha1 = 0.5;
  double jac = 0.0, sens = 0.0, costate = 0.0, grad = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SimplexState w = sample();
    const double v = sample.uniform(0.0, 1.0);
    const Vector3 lambda(sample.uniform(-1, 1), sample.uniform(-1, 1), sample.uniform(-1, 1));

    const Matrix3 fd_jac = testing::central_jacobian(
        [&](const Vector3& u) { return Vector3(replicator<double>(u, v, kBaseParams)); }, w);
    jac = std::max(jac, testing::relative_error(vector_field_jacobian(w, v, kBaseParams), fd_jac));

    Vector3 fd_sens;
    for (int k = 0; k < 3; ++k) {
      fd_sens(k) = testing::central_derivative(
          [&](double u) { return replicator<double>(w, u, kBaseParams)(k); }, v);
    }
    sens = std::max(sens, testing::relative_error(control_sensitivity(w, kBaseParams), fd_sens));

    Vector3 fd_rhs;
    for (int k = 0; k < 3; ++k) {
      fd_rhs(k) = -testing::central_derivative(
          [&](double u) {
            SimplexState p = w;
            p(k) = u;
            return hamiltonian(p, v, lambda, weights, kBaseParams);
          },
          w(k));
    }
    costate = std::max(costate, testing::relative_error(
                                    costate_rhs(w, v, lambda, weights, kBaseParams), fd_rhs));

    // Discrete adjoint on a 20-node grid starting from this state.
    const TimeGrid grid{0.0, 20.0, 19};
    Eigen::VectorXd values(grid.nodes());
    for (int k = 0; k < grid.nodes(); ++k) values(k) = sample.uniform(0.1, 0.9);
    const ControlTrajectory control{grid, values};
    const auto cost_of = [&](const ControlTrajectory& c) {
      return evaluate_cost(integrate_forward(w, c, kBaseParams), c, weights).total;
    };
    const Eigen::VectorXd g = discrete_adjoint_gradient(w, control, weights, kBaseParams).gradient;
    Eigen::VectorXd fd_grad(grid.nodes());
    for (int k = 0; k < grid.nodes(); ++k) {
      fd_grad(k) = testing::central_derivative(
          [&](double u) {
            ControlTrajectory c = control;
            c.values(k) = u;
            return cost_of(c);
          },
          values(k));
    }
    grad = std::max(grad, testing::relative_error(g, fd_grad));
  }
  out.require(jac <= 1e-6, fmt("jacobian %.3g", jac));
  out.require(sens <= 1e-6, fmt("control sensitivity %.3g", sens));
  out.require(costate <= 1e-4, fmt("costate rhs %.3g", costate));
  out.require(grad <= 1e-4, fmt("adjoint gradient %.3g", grad));
  if (out.pass) {
    out.detail = fmt("jac %.2g, f_v %.2g, costate %.2g", jac, sens, costate) +
                 fmt(", gradient %.2g", grad);
  }
  return out;
}

Outcome near_cooperation() {
  Outcome out;
  const ScenarioConfig c = preset("fig2");
  const auto traj =
      integrate_forward(c.w0, ControlTrajectory::constant(c.grid, *c.constant_v), c.params);
  const double initial = (traj.front() - c.weights.w_star).norm();
  const double final = (traj.back() - c.weights.w_star).norm();
  out.require(std::abs(initial - 0.002449) <= 1e-6, fmt("initial %.7f", initial));
  out.require(within(final, 0.007008, 0.05), fmt("final %.6f", final));
  if (out.pass) out.detail = fmt("initial %.7f, final %.6f", initial, final);
  return out;
}

Outcome saturation() {
  Outcome out;
  const ScenarioConfig c = preset("fig3");
  const SolveReport r = fbsm_solve(c.w0, c.grid, c.weights, c.params, c.solver);
  // The transient ends once the state is within 0.01 of the target.
  int end = c.grid.steps;
  for (int k = 0; k <= c.grid.steps; ++k) {
    if ((r.states.states[k] - c.weights.w_star).norm() <= 0.01) {
      end = k;
      break;
    }
  }
  const double t_half = 0.5 * (c.grid.time(end) - c.grid.t0);
  double low = c.weights.v_max;
  for (int k = 0; k <= c.grid.steps && c.grid.time(k) - c.grid.t0 <= t_half; ++k) {
    low = std::min(low, r.control.values(k));
  }
  out.require(r.converged, "solver did not converge");
  out.require(c.weights.v_max - low <= 1e-3, fmt("min v %.6f over first half", low));
  if (out.pass) {
    out.detail = fmt("transient ends t=%.2f, min v on [0, %.2f] = %.6f", c.grid.time(end), t_half,
                     low);
  }
  return out;
}

Outcome null_control() {
  Outcome out;
  for (const char* name : {"fig4-alpha3", "fig4-alpha4"}) {
    const ScenarioConfig c = preset(name);
    const SolveReport r = fbsm_solve(c.w0, c.grid, c.weights, c.params, c.solver);
    const double top = r.control.values.maxCoeff();
    out.require(r.converged, std::string(name) + " did not converge");
    out.require(top <= 1e-6, std::string(name) + fmt(" max v %.3g", top));
    out.detail += (out.detail.empty() ? "" : ", ") + std::string(name) + fmt(" max v %.3g", top);
  }
  return out;
}

Outcome comparison_table() {
  Outcome out;
  const CostWeights weights = comparison_weights();
  const auto saturated = constant_sweep(kW0, kComparisonGrid, weights, kBaseParams, {1.0});
  const auto sweep =
      constant_sweep(kW0, kComparisonGrid, weights, kBaseParams, sweep_values(101, 1.0));
  const SolveReport& opt = comparison_optimum();

  const double j_sat = saturated.best().breakdown.total;
  const double v_best = sweep.best().v;
  const double j_best = sweep.best().breakdown.total;
  const double j_opt = opt.breakdown.total;
  out.require(within(j_sat, 0.4400079, 0.02), fmt("J(v=1) %.7f", j_sat));
  out.require(std::abs(v_best - 0.57) <= 0.02 + 1e-12, fmt("best constant v %.2f", v_best));
  out.require(within(j_best, 0.3638641, 0.02), fmt("best constant J %.7f", j_best));
  out.require(opt.converged, "optimal solve did not converge");
  out.require(j_opt <= j_best, "optimal above best constant");
  out.require(within(j_opt, 0.3503187, 0.02), fmt("optimal J %.7f", j_opt));
  out.require(opt.breakdown.punished_integral < saturated.best().breakdown.punished_integral,
              "optimal punishes more than v=1");
  out.detail += fmt("J(1)=%.5f, best v=%.2f J=%.5f", j_sat, v_best, j_best) +
                fmt(", optimal J=%.5f", j_opt);
  return out;
}

Outcome kkt() {
  Outcome out;
  const SolveReport& opt = comparison_optimum();
  const KktResidual res = kkt_residual(opt.states, opt.control, opt.costate,
                                       comparison_weights(), kBaseParams);
  out.require(res.interior <= 1e-4, fmt("interior |H_v| %.3g", res.interior));
  out.require(res.lower <= 1e-4, fmt("lower bound sign %.3g", res.lower));
  out.require(res.upper <= 1e-4, fmt("upper bound sign %.3g", res.upper));
  out.detail += fmt("interior %.2g on %g nodes", res.interior, res.interior_nodes) +
                fmt(", lower %.2g on %g, upper %.2g", res.lower, res.lower_nodes, res.upper) +
                fmt(" on %g", res.upper_nodes);
  return out;
}

Outcome cross_solver() {
  Outcome out;
  const SolveReport& a = comparison_optimum();
  const SolveReport b =
      projected_gradient_solve(kW0, kComparisonGrid, comparison_weights(), kBaseParams);
  const double gap = std::abs(a.breakdown.total - b.breakdown.total) / a.breakdown.total;
  out.require(b.converged, "projected gradient did not converge");
  out.require(gap <= 0.01, fmt("relative gap %.3g", gap));
  out.detail += fmt("fbsm %.7f, pgd %.7f, gap %.2g", a.breakdown.total, b.breakdown.total, gap);
  return out;
}

Outcome critical_threshold() {
  Outcome out;
  const double vc = critical_punishment(kBaseParams);
  out.require(vc == 1.0 / 6.0, fmt("v_c %.17g", vc));
  // Near the threshold the approach to x=1 is slow, so the horizon is long.
  const TimeGrid grid{0.0, 300.0, 6000};
  const SimplexState w0(0.9, 0.1, 0.0);
  const auto end_state = [&](double v) {
    return integrate_forward(w0, ControlTrajectory::constant(grid, v), kBaseParams).back();
  };
  const double above = (end_state(vc + 0.02) - SimplexState(1, 0, 0)).norm();
  const double below = (end_state(vc - 0.02) - SimplexState(0, 1, 0)).norm();
  out.require(above <= 1e-4, fmt("v_c+0.02 ends %.3g from x=1", above));
  out.require(below <= 1e-4, fmt("v_c-0.02 ends %.3g from y=1", below));
  if (out.pass) {
    out.detail = fmt("v_c=%.6f, v_c+0.02 ends %.2g from x=1, v_c-0.02 ends %.2g from y=1", vc,
                     above, below);
  }

  // Informational: late control of the combined-weights presets.
  for (int i = 1; i <= 5; ++i) {
    const ScenarioConfig c = preset("fig9-" + std::to_string(i));
    const SolveReport r = fbsm_solve(c.w0, c.grid, c.weights, c.params, c.solver);
    double worst = 0.0;
    for (int k = 0; k <= c.grid.steps; ++k) {
      if (c.grid.time(k) >= c.grid.tf - 10.0) {
        worst = std::max(worst, std::abs(r.control.values(k) - vc));
      }
    }
    if (worst > 0.05) {
      std::printf("[WARN] 10 fig9-%d late control deviates from v_c by up to %.3f"
                  " (mid-horizon v=%.3f)\n",
                  i, worst, r.control.values(c.grid.steps / 2));
    }
  }
  return out;
}

Outcome integrator_order() {
  Outcome out;
  const auto final_state = [&](int steps) {
    return integrate_forward(kW0, ControlTrajectory::constant({0.0, 20.0, steps}, 0.57),
                             kBaseParams)
        .back();
  };
  const int n = 50;
  const SimplexState reference = final_state(16 * n);
  const double order = std::log2((final_state(n) - reference).norm() /
                                 (final_state(2 * n) - reference).norm());
  out.require(order >= 3.9, fmt("order %.3f", order));
  if (out.pass) out.detail = fmt("order %.3f", order);
  return out;
}

}  // namespace

int main() {
  run(1, "payoff oracle equivalence", 5.0, payoff_oracle);
  run(2, "simplex invariance and tangency", 5.0, simplex_invariance);
  run(3, "derivative oracles", 10.0, derivative_oracles);
  run(4, "near-cooperation drift", 1.0, near_cooperation);
  run(5, "tracking-only saturation", 30.0, saturation);
  run(6, "effort-only null control", 30.0, null_control);
  run(7, "strategy comparison table", 120.0, comparison_table);
  run(8, "KKT stationarity", 0.0, kkt);
  run(9, "cross-solver agreement", 0.0, cross_solver);
  run(10, "critical punishment", 0.0, critical_threshold);
  run(11, "integrator order", 0.0, integrator_order);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
