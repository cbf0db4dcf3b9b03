#include "fsi/heatwave.hpp"
#include "fsi/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace fsi;

namespace {

SystemOperators small_heatwave(int n) {
  HeatWaveConfig cfg;
  cfg.n_f = n;
  cfg.n_s = n;
  return assemble_heatwave(cfg);
}

OracleSettings coarse() {
  OracleSettings s;
  s.dt = 1e-2;
  return s;
}

}  // namespace

TEST_CASE("cost of a static system") {
  const Index n = 3;
  const SystemOperators sys =
      make_generic_system(Mat::Zero(n, n), Mat::Zero(n, 1), Mat::Identity(n, n));
  CostSpec cost;
  cost.R = Mat::Identity(n, n);
  cost.T = 2.0;
  Vec y0(n);
  y0 << 1.0, -2.0, 0.5;
  const ControlSignal g = ControlSignal::zeros(1, 2.0, 1e-2);
  CHECK(evaluate_cost(sys, cost, y0, g, coarse()) ==
        doctest::Approx(2.0 * y0.squaredNorm()).epsilon(1e-13));

  ControlSignal g2 = g;
  g2.values.setConstant(0.3);
  const ControlSignal grad = adjoint_gradient(sys, cost, y0, g2, coarse());
  CHECK((grad.values - 2.0 * g2.values).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("cost with zero control equals quadrature of the free trajectory") {
  const SystemOperators sys = small_heatwave(8);
  const CostSpec cost = CostSpec::full_energy(sys, 0.4);
  const StateVector y0 = make_initial_state(sys, InitialKind::smooth, 1);
  const ControlSignal g = ControlSignal::zeros(1, 0.4, 1e-2);
  const Trajectory tr = propagate_theta(sys, y0, g, 1e-2, 0.5);
  double J = 0.0;
  for (Index k = 0; k < tr.steps(); ++k) {
    const double a = (cost.R * tr.states.col(k)).squaredNorm();
    const double b = (cost.R * tr.states.col(k + 1)).squaredNorm();
    J += 0.5 * 1e-2 * (a + b);
  }
  CHECK(evaluate_cost(sys, cost, y0, g, coarse()) == doctest::Approx(J).epsilon(1e-10));
}

TEST_CASE("cost dominates the control energy") {
  const SystemOperators sys = small_heatwave(6);
  const CostSpec cost = CostSpec::full_energy(sys, 0.3);
  ControlSignal g = ControlSignal::zeros(1, 0.3, 1e-2);
  for (Index k = 0; k < g.intervals(); ++k) g.values(0, k) = std::sin(double(k));
  const double J = evaluate_cost(sys, cost, Vec::Zero(sys.state_dim()), g, coarse());
  CHECK(J >= g.norm() * g.norm());
}

TEST_CASE("adjoint gradient matches finite differences") {
  const SystemOperators sys = small_heatwave(8);
  const CostSpec cost = CostSpec::full_energy(sys, 0.3);
  const StateVector y0 = make_initial_state(sys, InitialKind::random_energy_unit, 2);
  const GradientCheck gc = gradient_check(sys, cost, y0, coarse(), 20);
  CHECK(gc.directions == 20);
  CHECK(gc.relative_errors.size() == 20);
  CHECK(gc.max_relative_error <= 1e-5);
}

TEST_CASE("CG minimizer") {
  const SystemOperators sys = small_heatwave(6);
  const CostSpec cost = CostSpec::full_energy(sys, 0.3);
  const StateVector y0 = make_initial_state(sys, InitialKind::smooth, 1);
  OracleSettings s = coarse();
  s.tol = 1e-10;
  const OracleResult r = minimize_cg(sys, cost, y0, s);
  CHECK(r.converged);
  for (std::size_t k = 1; k < r.J_history.size(); ++k) CHECK(r.J_history[k] <= r.J_history[k - 1] * (1.0 + 1e-14));
  CHECK(r.J_history.back() < r.J_history.front());
  const ControlSignal grad = adjoint_gradient(sys, cost, y0, r.g_star, s);
  CHECK(grad.norm() <= s.tol * (1.0 + r.g_star.norm()));

  // a second start lands on the same minimizer
  ControlSignal start = ControlSignal::zeros(1, 0.3, 1e-2);
  start.values.setConstant(5.0);
  const OracleResult r2 = minimize_cg(sys, cost, y0, s, start);
  CHECK(r2.converged);
  ControlSignal diff = r2.g_star;
  diff.values -= r.g_star.values;
  CHECK(diff.norm() <= 1e-6 * std::max(1.0, r.g_star.norm()));
  CHECK(r2.J_star == doctest::Approx(r.J_star).epsilon(1e-10));
}

TEST_CASE("zero initial state has the zero optimum") {
  const SystemOperators sys = small_heatwave(6);
  const CostSpec cost = CostSpec::full_energy(sys, 0.3);
  const OracleResult r = minimize_cg(sys, cost, Vec::Zero(sys.state_dim()), coarse());
  CHECK(r.g_star.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.J_star == 0.0);
}

TEST_CASE("scalar optimum is tanh(1)") {
  const SystemOperators sys = make_generic_system(Mat::Zero(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1));
  CostSpec cost;
  cost.R = Mat::Ones(1, 1);
  OracleSettings s;
  s.dt = 1e-3;
  const OracleResult r = minimize_cg(sys, cost, Vec::Ones(1), s);
  CHECK(std::abs(r.J_star - std::tanh(1.0)) <= 1e-3);
}
