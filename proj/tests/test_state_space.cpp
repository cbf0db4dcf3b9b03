#include "fsi/heatwave.hpp"
#include "fsi/state_space.hpp"
#include "fsi/stokes_lame.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace fsi;

namespace {

SystemOperators scalar_system(double a, double b = 0.0) {
  return make_generic_system(Mat::Constant(1, 1, a), Mat::Constant(1, 1, b), Mat::Identity(1, 1));
}

SystemOperators small_heatwave(int n = 8) {
  HeatWaveConfig cfg;
  cfg.n_f = n;
  cfg.n_s = n;
  return assemble_heatwave(cfg);
}

Mat random_matrix(Index r, Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat X(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) X(i, j) = nd(rng);
  return X;
}

}  // namespace

TEST_CASE("theta steps of y' = -y") {
  const SystemOperators sys = scalar_system(-1.0);
  const Vec y0 = Vec::Constant(1, 1.0);
  const Trajectory ie = propagate_free(sys, y0, 0.1, 0.1, 1.0);
  CHECK(ie.states(0, 1) == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
  const Trajectory cn = propagate_free(sys, y0, 0.1, 0.1, 0.5);
  CHECK(cn.states(0, 1) == doctest::Approx(0.95 / 1.05).epsilon(1e-15));
}

TEST_CASE("theta scheme order of accuracy") {
  const SystemOperators sys = small_heatwave(8);
  const StateVector y0 = make_initial_state(sys, InitialKind::smooth, 1);
  const double T = 0.2;
  for (double theta : {1.0, 0.5}) {
    const Vec ref = propagate_free(sys, y0, T, T / 6400, theta).states.rightCols(1);
    auto err = [&](double dt) {
      const Vec y = propagate_free(sys, y0, T, dt, theta).states.rightCols(1);
      return std::sqrt((y - ref).dot(sys.energy * (y - ref)));
    };
    const double ratio = err(T / 100) / err(T / 200);
    const double expected = theta == 1.0 ? 2.0 : 4.0;
    CHECK(ratio > expected / 1.5);
    CHECK(ratio < expected * 1.5);
  }
}

TEST_CASE("energy is non-increasing under implicit Euler") {
  const SystemOperators sys = small_heatwave(16);
  const StateVector y0 = make_initial_state(sys, InitialKind::random_energy_unit, 4);
  const Trajectory tr = propagate_free(sys, y0, 0.2, 1e-3, 1.0);
  CHECK(tr.steps() == 200);
  CHECK(max_energy_increase(sys, tr) <= 1e-12);
}

TEST_CASE("Crank-Nicolson conserves the energy of an undamped system") {
  // harmonic oscillator: x'' = -x as (x, v)
  Mat A(2, 2);
  A << 0, 1, -1, 0;
  const SystemOperators sys = make_generic_system(A, Mat::Zero(2, 1), Mat::Identity(2, 2));
  Vec y0(2);
  y0 << 1.0, 0.0;
  const Trajectory tr = propagate_free(sys, y0, 1.0, 1e-2, 0.5);
  const double e0 = y0.squaredNorm();
  for (Index k = 0; k <= tr.steps(); ++k)
    CHECK(std::abs(tr.states.col(k).squaredNorm() - e0) <= 1e-12);
}

TEST_CASE("control grid must cover the stepping grid") {
  const ControlSignal g = ControlSignal::zeros(1, 0.5, 0.1);
  CHECK(control_interval_map(g, 5, 0.1).size() == 5);
  CHECK_THROWS_AS(control_interval_map(g, 10, 0.1), InvalidArgument);
  const SystemOperators sys = scalar_system(-1.0, 1.0);
  CHECK_THROWS_AS(propagate_theta(sys, Vec::Ones(1), g, 0.1, 0.3), InvalidArgument);
  CHECK_THROWS_AS(propagate_theta(sys, Vec::Ones(2), g, 0.1, 1.0), InvalidArgument);
}

TEST_CASE("fluid decomposition identities") {
  const SystemOperators sys = small_heatwave(12);
  const StateVector y0 = make_initial_state(sys, InitialKind::random_energy_unit, 2);
  ControlSignal g = ControlSignal::zeros(1, 0.3, 1e-2);
  for (Index k = 0; k < g.intervals(); ++k) g.values(0, k) = std::sin(10.0 * k * 1e-2);
  const Trajectory tr = propagate_theta(sys, y0, g, 1e-2, 1.0);
  const FluidDecomposition d = decompose_fluid(sys, tr);
  const Mat u = tr.states.middleRows(sys.blocks.u.start, sys.blocks.u.size);
  CHECK((d.u1 + d.u2 - u).cwiseAbs().maxCoeff() <= 1e-15 * u.cwiseAbs().maxCoeff());
  CHECK(d.u2.col(0).norm() == 0.0);

  // scaling the data scales both parts
  Trajectory tr2 = tr;
  tr2.states *= 3.0;
  const FluidDecomposition d2 = decompose_fluid(sys, tr2);
  CHECK((d2.u1 - 3.0 * d.u1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((d2.u2 - 3.0 * d.u2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("without solid coupling u2 vanishes") {
  // a pure fluid: the generic system's fluid operator is the whole system
  Mat K(3, 3);
  K << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  SystemOperators sys = make_generic_system(-K, Mat::Zero(3, 1), Mat::Identity(3, 3));
  sys.fluid_mass = SpMat(Mat::Identity(3, 3).sparseView());
  sys.fluid_stiffness = K.sparseView();
  Vec y0(3);
  y0 << 1, -2, 0.5;
  const Trajectory tr = propagate_free(sys, y0, 0.5, 1e-2, 1.0);
  const FluidDecomposition d = decompose_fluid(sys, tr);
  CHECK(d.u2.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("fractional powers") {
  const SystemOperators sys = small_heatwave(10);
  const StateVector y = make_initial_state(sys, InitialKind::random_energy_unit, 8);
  const StateVector y0 = apply_component_fractional_power(sys, 0.0, y);
  CHECK((y0 - y).norm() <= 1e-12 * y.norm());
  for (FractionalMode mode : {FractionalMode::per_block, FractionalMode::velocity_coupled}) {
    const StateVector up = apply_component_fractional_power(sys, 0.4, y, mode);
    const StateVector back = apply_component_fractional_power(sys, -0.4, up, mode);
    CHECK((back - y).norm() <= 1e-9 * y.norm());
  }

  // order 1 on the fluid pair is M^{-1} K
  const Mat P1 = pair_fractional_power(sys.frac_fluid, 1.0);
  const Mat Mf(sys.fluid_mass), Kf(sys.fluid_stiffness);
  const Mat direct = Mf.ldlt().solve(Kf);
  CHECK((P1 - direct).cwiseAbs().maxCoeff() <= 1e-9 * direct.cwiseAbs().maxCoeff());

  // generalized eigenvectors map to lambda^s v
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Kf, Mf);
  const Vec v = es.eigenvectors().col(2);
  const double lam = es.eigenvalues()[2];
  const Mat Ps = pair_fractional_power(sys.frac_fluid, -0.3);
  CHECK((Ps * v - std::pow(lam, -0.3) * v).norm() <= 1e-9 * v.norm());

  CHECK_THROWS_AS(apply_component_fractional_power(sys, 1.5, y), InvalidArgument);
  CHECK_THROWS_AS(parse_fractional_mode("blockwise"), InvalidArgument);
}

TEST_CASE("fractional calculus refuses oversized pairs") {
  HeatWaveConfig cfg;
  cfg.n_f = int(kFractionalDimCap) + 1;
  cfg.n_s = 4;
  const SystemOperators sys = assemble_heatwave(cfg);
  CHECK_THROWS_AS(pair_fractional_power(sys.frac_fluid, 0.5), InvalidArgument);
}

TEST_CASE("energy and trace helpers") {
  const SystemOperators sys = small_heatwave(6);
  const Vec zero = Vec::Zero(sys.state_dim());
  CHECK(energy_of(sys, zero) == 0.0);
  const StateVector y = make_initial_state(sys, InitialKind::random_energy_unit, 3);
  CHECK(energy_of(sys, 2.0 * y) == doctest::Approx(4.0 * energy_of(sys, y)).epsilon(1e-14));
  const Mat E(sys.energy);
  double direct = 0.0;
  for (Index i = 0; i < y.size(); ++i)
    for (Index j = 0; j < y.size(); ++j) direct += 0.5 * y[i] * E(i, j) * y[j];
  CHECK(energy_of(sys, y) == doctest::Approx(direct).epsilon(1e-13));

  Vec s = zero;
  s[sys.blocks.u.end() - 1] = 0.7;
  CHECK(interface_trace(sys, s)[0] == 0.7);
  CHECK(interface_trace(sys, zero).norm() == 0.0);
  CHECK(trace_norm(sys, interface_trace(sys, s)) == doctest::Approx(0.7));
}

TEST_CASE("observation factor reproduces a semidefinite Gram") {
  const Mat X = random_matrix(6, 4, 21);
  const Mat G = X * X.transpose();  // rank 4
  const Mat R = observation_factor(G.sparseView());
  CHECK((R.transpose() * R - G).cwiseAbs().maxCoeff() <= 1e-12 * G.cwiseAbs().maxCoeff());
  Mat bad = Mat::Identity(3, 3);
  bad(2, 2) = -1.0;
  CHECK_THROWS_AS(observation_factor(bad.sparseView()), InvalidArgument);
}

TEST_CASE("propagation is deterministic and sparse and dense solvers agree") {
  const SystemOperators sys = small_heatwave(20);
  const StateVector y0 = make_initial_state(sys, InitialKind::random_energy_unit, 6);
  const Trajectory a = propagate_free(sys, y0, 0.05, 1e-3, 0.5);
  const Trajectory b = propagate_free(sys, y0, 0.05, 1e-3, 0.5);
  CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);

  const SystemOperators dense = make_generic_system(Mat(sys.A), sys.B, sys.R, Mat(sys.M));
  const Trajectory c = propagate_free(dense, y0, 0.05, 1e-3, 0.5);
  CHECK((a.states - c.states).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("2D trajectories stay divergence free") {
  const SystemOperators sys = assemble_stokes_lame(StokesLameConfig{});
  const StateVector y0 = make_initial_state(sys, InitialKind::smooth, 1);
  const Trajectory tr = propagate_free(sys, y0, 0.05, 1e-3, 0.5);
  CHECK(divergence_residual(sys, tr) <= 1e-10);
  CHECK(adjoint_identity_error(sys) <= 1e-12);
}
