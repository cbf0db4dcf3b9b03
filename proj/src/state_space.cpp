#include "fsi/state_space.hpp"

#include "fsi/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fsi {

// ---------------------------------------------------------------- generic

SystemOperators make_generic_system(const Mat& A, const Mat& B, const Mat& R, const Mat& M) {
  const Index n = A.rows();
  require(A.cols() == n, "generic system: A must be square");
  require(B.rows() == n, "generic system: B rows must match A");
  require(R.cols() == n, "generic system: R columns must match A");
  const Mat mass = M.size() == 0 ? Mat(Mat::Identity(n, n)) : M;
  require(mass.rows() == n && mass.cols() == n, "generic system: M must match A");

  SystemOperators sys;
  sys.M = mass.sparseView();
  sys.A = A.sparseView(0.0, 0.0);
  sys.B = B;
  sys.Tr = B.transpose();
  sys.boundary_mass = Mat::Identity(B.cols(), B.cols());
  sys.R = R;
  const Mat gram = R.transpose() * R;
  sys.energy = gram.sparseView(0.0, 0.0);
  sys.y_gram = mass.sparseView();
  sys.blocks.u = {0, n};
  sys.blocks.w = {n, 0};
  sys.blocks.wt = {n, 0};
  sys.fluid_mass = sys.M;
  sys.fluid_stiffness = SpMat(-sys.A);
  return sys;
}

Mat observation_factor(const SpMat& gram) {
  const Mat G = Mat(gram);
  require(G.rows() == G.cols(), "observation_factor: gram must be square");
  if (G.rows() == 0) return Mat(0, 0);
  require(G.allFinite(), "observation_factor: gram has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (G + G.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("observation_factor: eigensolver failed");
  const double floor = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  require(eig.eigenvalues().minCoeff() >= -floor, "observation_factor: gram is not positive semidefinite");
  const Vec d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Mat R = d.asDiagonal() * eig.eigenvectors().transpose();
  return R;
}

// ---------------------------------------------------------------- controls

ControlSignal ControlSignal::zeros(Index m, double T, double dt) {
  require(dt > 0.0 && T > 0.0, "ControlSignal::zeros: T and dt must be positive");
  const Index steps = static_cast<Index>(std::llround(T / dt));
  require(steps >= 1, "ControlSignal::zeros: horizon shorter than one step");
  return uniform(Mat::Zero(m, steps), T);
}

ControlSignal ControlSignal::uniform(const Mat& values, double T) {
  require(values.cols() >= 1, "ControlSignal::uniform: need at least one interval");
  ControlSignal g;
  g.values = values;
  g.t_grid.resize(values.cols() + 1);
  for (Index k = 0; k <= values.cols(); ++k) g.t_grid[k] = T * double(k) / double(values.cols());
  g.t_grid.back() = T;
  return g;
}

double ControlSignal::dot(const ControlSignal& other) const {
  require(other.values.rows() == values.rows() && other.values.cols() == values.cols(),
          "ControlSignal::dot: shape mismatch");
  double acc = 0.0;
  for (Index k = 0; k < intervals(); ++k) acc += width(k) * values.col(k).dot(other.values.col(k));
  return acc;
}

double ControlSignal::norm() const { return std::sqrt(dot(*this)); }

std::vector<Index> control_interval_map(const ControlSignal& g, Index steps, double dt) {
  require(g.t_grid.size() >= 2 && g.intervals() + 1 == Index(g.t_grid.size()),
          "control signal: grid and values disagree");
  for (std::size_t k = 1; k < g.t_grid.size(); ++k) {
    require(g.t_grid[k] > g.t_grid[k - 1], "control signal: grid must be strictly increasing");
  }
  const double T = steps * dt;
  const double tol = 1e-9 * std::max(1.0, T);
  if (std::abs(g.t_grid.front()) > tol || std::abs(g.t_grid.back() - T) > tol) {
    std::ostringstream os;
    os << "control grid [" << g.t_grid.front() << ", " << g.t_grid.back()
       << "] does not cover the horizon [0, " << T << "]";
    throw InvalidArgument(os.str());
  }
  std::vector<Index> map(steps);
  Index j = 0;
  for (Index k = 0; k < steps; ++k) {
    const double mid = (k + 0.5) * dt;
    while (j + 1 < g.intervals() && g.t_grid[j + 1] <= mid) ++j;
    map[k] = j;
  }
  return map;
}

// ---------------------------------------------------------------- stepping

struct StepSolver::Impl {
  bool dense = false;
  Eigen::PartialPivLU<Mat> dense_lu;
  Eigen::SparseLU<SpMat> sparse_lu;
  SpMat explicit_part;
};

StepSolver::StepSolver(const SpMat& M, const SpMat& A, double dt, double theta)
    : impl_(std::make_unique<Impl>()), dt_(dt), theta_(theta) {
  require(dt > 0.0, "theta stepper: dt must be positive");
  require(theta >= 0.5 && theta <= 1.0, "theta stepper: theta must lie in [1/2, 1]");
  require(M.rows() == A.rows() && M.cols() == A.cols(), "theta stepper: M and A differ in shape");
  const SpMat lhs = M - (theta * dt) * A;
  impl_->explicit_part = M + ((1.0 - theta) * dt) * A;
  const Index n = M.rows();
  impl_->dense = n <= 64 || double(lhs.nonZeros()) > 0.2 * double(n) * double(n);
  if (impl_->dense) {
    impl_->dense_lu.compute(Mat(lhs));
    const double rc = impl_->dense_lu.rcond();
    if (!(rc > 1e-14)) {
      throw NumericalError("theta stepper: step matrix M - theta dt A is singular (rcond " +
                           std::to_string(rc) + ")");
    }
  } else {
    impl_->sparse_lu.analyzePattern(lhs);
    impl_->sparse_lu.factorize(lhs);
    if (impl_->sparse_lu.info() != Eigen::Success) {
      throw NumericalError("theta stepper: step matrix M - theta dt A is singular");
    }
  }
}

StepSolver::~StepSolver() = default;
StepSolver::StepSolver(StepSolver&&) noexcept = default;
StepSolver& StepSolver::operator=(StepSolver&&) noexcept = default;

Vec StepSolver::step(const Vec& y, const Vec& load) const {
  Vec rhs = impl_->explicit_part * y;
  if (load.size() != 0) rhs += load;
  if (impl_->dense) return impl_->dense_lu.solve(rhs);
  return impl_->sparse_lu.solve(rhs);
}

Mat StepSolver::step_many(const Mat& Y) const {
  const Mat rhs = impl_->explicit_part * Y;
  if (impl_->dense) return impl_->dense_lu.solve(rhs);
  return impl_->sparse_lu.solve(rhs);
}

Vec StepSolver::solve_transpose(const Vec& rhs) const {
  if (impl_->dense) return impl_->dense_lu.transpose().solve(rhs);
  return impl_->sparse_lu.transpose().solve(rhs);
}

Vec StepSolver::explicit_transpose(const Vec& x) const {
  return impl_->explicit_part.transpose() * x;
}

Trajectory propagate_theta(const SystemOperators& sys, const StateVector& y0,
                           const ControlSignal& g, double dt, double theta) {
  const Index n = sys.state_dim();
  require(y0.size() == n, "propagate_theta: initial state has wrong length");
  require(g.dim() == sys.control_dim(), "propagate_theta: control dimension mismatch");
  require(dt > 0.0, "propagate_theta: dt must be positive");
  const double T = g.horizon();
  const Index steps = static_cast<Index>(std::llround(T / dt));
  require(steps >= 1, "propagate_theta: horizon shorter than one step");
  const auto map = control_interval_map(g, steps, dt);

  StepSolver solver(sys.M, sys.A, dt, theta);
  Trajectory traj;
  traj.dt = dt;
  traj.theta = theta;
  traj.stepper = theta == 1.0 ? "implicit_euler" : (theta == 0.5 ? "crank_nicolson" : "theta");
  traj.t_grid.resize(steps + 1);
  traj.states.resize(n, steps + 1);
  traj.states.col(0) = y0;
  traj.t_grid[0] = 0.0;
  const Mat dtB = dt * sys.B;
  for (Index k = 0; k < steps; ++k) {
    const Vec load = dtB * g.values.col(map[k]);
    traj.states.col(k + 1) = solver.step(traj.states.col(k), load);
    traj.t_grid[k + 1] = (k + 1) * dt;
  }
  return traj;
}

Trajectory propagate_free(const SystemOperators& sys, const StateVector& y0, double T,
                          double dt, double theta) {
  return propagate_theta(sys, y0, ControlSignal::zeros(sys.control_dim(), T, dt), dt, theta);
}

// ---------------------------------------------------------------- splitting

FluidDecomposition decompose_fluid(const SystemOperators& sys, const Trajectory& traj) {
  require(traj.states.rows() == sys.state_dim(),
          "decompose_fluid: trajectory does not belong to this system");
  require(traj.states.cols() >= 1, "decompose_fluid: empty trajectory");
  const BlockRange u = sys.blocks.u;
  require(sys.fluid_mass.rows() == u.size, "decompose_fluid: system has no fluid operator");

  FluidDecomposition out;
  out.u1.resize(u.size, traj.states.cols());
  out.u1.col(0) = traj.states.col(0).segment(u.start, u.size);
  if (traj.steps() > 0) {
    const SpMat fluid_gen = -sys.fluid_stiffness;
    StepSolver solver(sys.fluid_mass, fluid_gen, traj.dt, traj.theta);
    for (Index k = 0; k < traj.steps(); ++k) {
      out.u1.col(k + 1) = solver.step(out.u1.col(k), Vec());
    }
  }
  out.u2 = traj.states.middleRows(u.start, u.size) - out.u1;
  return out;
}

Mat fluid_free_trace_norms(const SystemOperators& sys, const Mat& u0, double dt, Index steps,
                           double theta, bool parallel) {
  const BlockRange u = sys.blocks.u;
  require(u0.rows() == u.size, "fluid_free_trace_norms: initial data must be u-block sized");
  const SpMat fluid_gen = -sys.fluid_stiffness;
  const StepSolver solver(sys.fluid_mass, fluid_gen, dt, theta);
  const Mat tr_u = sys.Tr.middleCols(u.start, u.size);
  const kernels::Advance advance = [&solver](const Vec& y) { return solver.step(y, Vec()); };
  const kernels::Observe observe = [&](const Vec& y) { return trace_norm(sys, tr_u * y); };
  return parallel ? kernels::ensemble_observe_omp(u0, steps, advance, observe)
                  : kernels::ensemble_observe_serial(u0, steps, advance, observe);
}

// ---------------------------------------------------------------- fractional powers

FractionalMode parse_fractional_mode(std::string_view name) {
  if (name == "per_block") return FractionalMode::per_block;
  if (name == "velocity_coupled") return FractionalMode::velocity_coupled;
  throw InvalidArgument("unknown fractional mode '" + std::string(name) + "'");
}

Mat pair_fractional_power(const SpdPair& pair, double s) {
  require(std::abs(s) <= 1.0, "fractional power: |s| must be <= 1");
  const Index dim = pair.mass.rows();
  if (dim > kFractionalDimCap) {
    throw InvalidArgument("fractional power: block dimension " + std::to_string(dim) +
                          " exceeds the cap " + std::to_string(kFractionalDimCap));
  }
  if (s == 0.0) return Mat::Identity(dim, dim);
  const Mat K = Mat(pair.stiffness);
  const Mat M = Mat(pair.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(K, M);
  if (es.info() != Eigen::Success) {
    throw NumericalError("fractional power: generalized eigen-decomposition failed");
  }
  const Vec lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) {
    throw NumericalError("fractional power: pair is not positive definite");
  }
  const Mat& V = es.eigenvectors();
  const Vec pw = lam.array().pow(s).matrix();
  return V * pw.asDiagonal() * V.transpose() * M;
}

Mat fractional_power_matrix(const SystemOperators& sys, double s, FractionalMode mode) {
  require(std::abs(s) <= 1.0, "fractional power: |s| must be <= 1");
  const Index n = sys.state_dim();
  Mat S = Mat::Identity(n, n);
  if (s == 0.0) return S;
  const IndexMap& b = sys.blocks;
  if (!sys.frac_displacement.empty()) {
    S.block(b.w.start, b.w.start, b.w.size, b.w.size) = pair_fractional_power(sys.frac_displacement, s);
  }
  if (mode == FractionalMode::per_block || sys.frac_velocity.empty()) {
    if (!sys.frac_fluid.empty()) {
      S.block(b.u.start, b.u.start, b.u.size, b.u.size) = pair_fractional_power(sys.frac_fluid, s);
    }
    return S;
  }
  // velocity field ordering: u block, then w_t block
  const Mat Sv = pair_fractional_power(sys.frac_velocity, s);
  require(Sv.rows() == b.u.size + b.wt.size, "fractional power: velocity pair has wrong size");
  std::vector<Index> pos;
  pos.reserve(Sv.rows());
  for (Index i = 0; i < b.u.size; ++i) pos.push_back(b.u.start + i);
  for (Index i = 0; i < b.wt.size; ++i) pos.push_back(b.wt.start + i);
  for (Index c = 0; c < Sv.cols(); ++c)
    for (Index r = 0; r < Sv.rows(); ++r) S(pos[r], pos[c]) = Sv(r, c);
  return S;
}

StateVector apply_component_fractional_power(const SystemOperators& sys, double s,
                                             const StateVector& y, FractionalMode mode) {
  require(y.size() == sys.state_dim(), "fractional power: state has wrong length");
  return fractional_power_matrix(sys, s, mode) * y;
}

// ---------------------------------------------------------------- energy and traces

double energy_of(const SystemOperators& sys, const StateVector& y) {
  require(y.size() == sys.state_dim(), "energy_of: state has wrong length");
  return 0.5 * y.dot(sys.energy * y);
}

double energy_norm(const SystemOperators& sys, const StateVector& y) {
  return std::sqrt(std::max(0.0, 2.0 * energy_of(sys, y)));
}

double y_norm(const SystemOperators& sys, const StateVector& y) {
  require(y.size() == sys.state_dim(), "y_norm: state has wrong length");
  return std::sqrt(std::max(0.0, y.dot(sys.y_gram * y)));
}

Vec interface_trace(const SystemOperators& sys, const StateVector& y) {
  require(y.size() == sys.state_dim(), "interface_trace: state has wrong length");
  return sys.Tr * y;
}

double trace_norm(const SystemOperators& sys, const Vec& trace) {
  return std::sqrt(std::max(0.0, trace.dot(sys.boundary_mass * trace)));
}

// ---------------------------------------------------------------- initial data

InitialKind parse_initial_kind(std::string_view name) {
  if (name == "random_energy_unit") return InitialKind::random_energy_unit;
  if (name == "smooth") return InitialKind::smooth;
  if (name == "delta_like") return InitialKind::delta_like;
  throw InvalidArgument("unknown initial state kind '" + std::string(name) + "'");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::random_energy_unit: return "random_energy_unit";
    case InitialKind::smooth: return "smooth";
    case InitialKind::delta_like: return "delta_like";
  }
  return "unknown";
}

StateVector make_initial_state(const SystemOperators& sys, InitialKind kind, std::uint64_t seed) {
  const Index n = sys.state_dim();
  Vec y;
  switch (kind) {
    case InitialKind::random_energy_unit: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      y.resize(n);
      for (Index i = 0; i < n; ++i) y[i] = normal(rng);
      break;
    }
    case InitialKind::smooth:
      require(sys.smooth_profile.size() == n, "make_initial_state: system has no smooth profile");
      y = sys.smooth_profile;
      break;
    case InitialKind::delta_like:
      require(sys.delta_profile.size() == n, "make_initial_state: system has no delta profile");
      y = sys.delta_profile;
      break;
  }
  const double norm = energy_norm(sys, y);
  if (!(norm > 0.0)) throw NumericalError("make_initial_state: state has zero energy");
  return y / norm;
}

// ---------------------------------------------------------------- invariants

double divergence_residual(const SystemOperators& sys, const Trajectory& traj) {
  if (sys.divergence.rows() == 0) return 0.0;
  const BlockRange u = sys.blocks.u;
  const Mat Dl = Mat(sys.divergence) * sys.lift;
  double worst = 0.0;
  for (Index k = 0; k < traj.states.cols(); ++k) {
    const Vec uk = traj.states.col(k).segment(u.start, u.size);
    const double scale = std::max(1.0, (sys.lift * uk).cwiseAbs().maxCoeff());
    worst = std::max(worst, (Dl * uk).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

double max_energy_increase(const SystemOperators& sys, const Trajectory& traj) {
  const double e0 = energy_of(sys, traj.states.col(0));
  require(e0 > 0.0, "max_energy_increase: initial energy is zero");
  double worst = -std::numeric_limits<double>::infinity();
  double prev = e0;
  for (Index k = 1; k < traj.states.cols(); ++k) {
    const double e = energy_of(sys, traj.states.col(k));
    worst = std::max(worst, (e - prev) / e0);
    prev = e;
  }
  return worst;
}

double adjoint_identity_error(const SystemOperators& sys, Index pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = sys.state_dim(), m = sys.control_dim();
  const double b_norm = sys.B.norm();
  double worst = 0.0;
  for (Index i = 0; i < pairs; ++i) {
    Vec y(n), g(m);
    for (Index k = 0; k < n; ++k) y[k] = normal(rng);
    for (Index k = 0; k < m; ++k) g[k] = normal(rng);
    const double lhs = g.dot(sys.B.transpose() * y);
    const double rhs = g.dot(sys.boundary_mass * interface_trace(sys, y));
    const double scale = g.norm() * b_norm * y.norm();
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace fsi
