#include <doctest.h>

#include <cmath>

#include "opgg/integrator.hpp"
#include "oracles.hpp"

using namespace opgg;
using opgg::testing::kBaseParams;

namespace {

SimplexState final_state(const SimplexState& w0, double v, double tf, int steps) {
  const TimeGrid grid{0.0, tf, steps};
  return integrate_forward(w0, ControlTrajectory::constant(grid, v), kBaseParams).back();
}

}  // namespace

TEST_CASE("TimeGrid and ControlTrajectory validation") {
  CHECK_THROWS_AS((TimeGrid{1.0, 1.0, 10}).validate(), DomainError);
  CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 0}).validate(), DomainError);
  const TimeGrid grid{0.0, 2.0, 4};
  CHECK(grid.time(3) == doctest::Approx(1.5));
  ControlTrajectory bad{grid, Eigen::VectorXd::Constant(4, 0.5)};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.values = Eigen::VectorXd::Constant(5, 1.2);
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("rk4_step") {
  SUBCASE("vertex is a fixed point") {
    const SimplexState w = rk4_step(SimplexState(1, 0, 0), 0.3, 0.3, 0.3, 0.1, kBaseParams);
    CHECK(w == SimplexState(1, 0, 0));
  }
  SUBCASE("first-order agreement with the vector field") {
    const SimplexState w(0.2, 0.7, 0.1);
    const Vector3 f = vector_field(w, 0.0, kBaseParams);
    for (double dt : {1e-3, 1e-4}) {
      const Vector3 slope = (rk4_step(w, 0, 0, 0, dt, kBaseParams) - w) / dt;
      CHECK((slope - f).norm() <= 10.0 * dt * f.norm());
    }
  }
  SUBCASE("oversized step is reported") {
    CHECK_THROWS_AS(rk4_step(SimplexState(0.2, 0.7, 0.1), 1, 1, 1, 50.0, kBaseParams),
                    NumericError);
    CHECK_THROWS_AS(rk4_step(SimplexState(0.2, 0.7, 0.1), 1, 1, 1, -0.1, kBaseParams),
                    DomainError);
  }
}

TEST_CASE("integrate_forward") {
  SUBCASE("initial node is exact and vertices stay put") {
    const TimeGrid grid{0.0, 10.0, 50};
    const SimplexState w0(0.2, 0.7, 0.1);
    const auto traj = integrate_forward(w0, ControlTrajectory::constant(grid, 0.4), kBaseParams);
    CHECK(traj.states.size() == 51);
    CHECK(traj.front() == w0);
    for (const SimplexState& vertex :
         {SimplexState(1, 0, 0), SimplexState(0, 1, 0), SimplexState(0, 0, 1)}) {
      const auto still = integrate_forward(vertex, ControlTrajectory::constant(grid, 0.4), kBaseParams);
      for (const auto& w : still.states) CHECK(w == vertex);
    }
  }

  SUBCASE("near-cooperation drift with no punishment") {
    const TimeGrid grid{0.0, 4.0, 600};
    const auto traj = integrate_forward(SimplexState(0.998, 0.001, 0.001),
                                        ControlTrajectory::constant(grid, 0.0), kBaseParams);
    const SimplexState target(1, 0, 0);
    CHECK((traj.front() - target).norm() == doctest::Approx(std::sqrt(6e-6)).epsilon(1e-12));
    CHECK((traj.front() - target).norm() == doctest::Approx(0.002449).epsilon(1e-3));
    CHECK((traj.back() - target).norm() == doctest::Approx(0.007008).epsilon(0.05));
  }

  SUBCASE("punishment-free system cycles through all three strategies") {
    const TimeGrid grid{0.0, 70.0, 600};
    const auto traj = integrate_forward(SimplexState(0.2, 0.7, 0.1),
                                        ControlTrajectory::constant(grid, 0.0), kBaseParams);
    // Every coordinate turns around at least once, and the orbit stays interior.
    for (int i = 0; i < 3; ++i) {
      int turns = 0;
      for (int k = 1; k < grid.steps; ++k) {
        const double a = traj.states[k](i) - traj.states[k - 1](i);
        const double b = traj.states[k + 1](i) - traj.states[k](i);
        if (a * b < 0.0) ++turns;
      }
      CHECK(turns >= 1);
    }
    double min_component = 1.0;
    for (const auto& w : traj.states) min_component = std::min(min_component, w.minCoeff());
    CHECK(min_component > 0.01);
  }

  SUBCASE("simplex preservation before renormalization") {
    StepDiagnostics diag;
    const TimeGrid grid{0.0, 70.0, 250};
    for (double v : {0.0, 0.3, 1.0}) {
      integrate_forward(SimplexState(0.2, 0.7, 0.1), ControlTrajectory::constant(grid, v),
                        kBaseParams, &diag);
    }
    CHECK(diag.max_sum_error <= 1e-9);
    CHECK(diag.min_component >= -1e-12);
  }

  SUBCASE("deterministic") {
    const TimeGrid grid{0.0, 20.0, 400};
    ControlTrajectory control{grid, Eigen::VectorXd::LinSpaced(401, 0.0, 1.0)};
    const auto a = integrate_forward(SimplexState(0.2, 0.7, 0.1), control, kBaseParams);
    const auto b = integrate_forward(SimplexState(0.2, 0.7, 0.1), control, kBaseParams);
    for (int k = 0; k <= 400; ++k) CHECK(a.states[k] == b.states[k]);
  }
}

TEST_CASE("RK4 self-convergence order") {
  const SimplexState w0(0.2, 0.7, 0.1);
  for (double v : {0.0, 0.57, 1.0}) {
    const int n = 50;
    const SimplexState reference = final_state(w0, v, 20.0, 16 * n);
    const double coarse = (final_state(w0, v, 20.0, n) - reference).norm();
    const double fine = (final_state(w0, v, 20.0, 2 * n) - reference).norm();
    CHECK(std::log2(coarse / fine) >= 3.8);
  }
}
