#include "fsi/riccati.hpp"

#include "fsi/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace fsi {

CostSpec CostSpec::full_energy(const SystemOperators& sys, double T) {
  CostSpec c;
  c.R = sys.R;
  c.T = T;
  return c;
}

void CostSpec::validate(Index state_dim) const {
  require(R.cols() == state_dim, "cost: R has " + std::to_string(R.cols()) +
                                     " columns, state dimension is " + std::to_string(state_dim));
  require(control_weight > 0.0, "cost: control_weight must be positive");
  require(T > 0.0, "cost: horizon T must be positive");
}

DreScheme parse_dre_scheme(std::string_view name) {
  if (name == "implicit_euler") return DreScheme::implicit_euler;
  if (name == "bdf2") return DreScheme::bdf2;
  if (name == "exact_flow") return DreScheme::exact_flow;
  throw InvalidArgument("unknown DRE scheme '" + std::string(name) + "'");
}

std::string to_string(DreScheme scheme) {
  switch (scheme) {
    case DreScheme::exact_flow: return "exact_flow";
    case DreScheme::implicit_euler: return "implicit_euler";
    case DreScheme::bdf2: return "bdf2";
  }
  return "unknown";
}

namespace {

Index step_count(double T, double dt) {
  require(dt > 0.0, "dt must be positive");
  const Index steps = static_cast<Index>(std::llround(T / dt));
  require(steps >= 1, "horizon shorter than one step");
  if (std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T)) {
    std::ostringstream os;
    os << "dt = " << dt << " does not divide the horizon T = " << T;
    throw InvalidArgument(os.str());
  }
  return steps;
}

// lambda_min and ||P||_2 of a symmetric matrix
std::pair<double, double> eig_extremes(const Mat& P) {
  if (P.rows() == 0) return {0.0, 0.0};
  Eigen::SelfAdjointEigenSolver<Mat> es(P, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.cwiseAbs().maxCoeff()};
}

double ratio(double lam_min, double norm) {
  if (norm == 0.0) return lam_min >= 0.0 ? 0.0 : -1.0;
  return lam_min / norm;
}

void symmetrize(Mat& P) {
  const Mat t = P.transpose();
  P = 0.5 * (P + t);
}

}  // namespace

Mat RiccatiFlowMap::apply(const Mat& P) const {
  const Index n = P.rows();
  // P (I + G P)^{-1} = ((I + P G)^{-1} P)'
  const Mat IPG = Mat::Identity(n, n) + P * G;
  const Mat Y = IPG.partialPivLu().solve(P).transpose();
  Mat out = Q + Phi.transpose() * Y * Phi;
  symmetrize(out);
  return out;
}

RiccatiFlowMap RiccatiFlowMap::doubled() const {
  const Index n = Phi.rows();
  const Mat IGQ = Mat::Identity(n, n) + G * Q;
  const Eigen::PartialPivLU<Mat> lu(IGQ);
  const Mat WPhi = lu.solve(Phi);                 // (I + G Q)^{-1} Phi
  const Mat WG = lu.solve(G);                     // (I + G Q)^{-1} G
  RiccatiFlowMap d;
  d.Phi = Phi * WPhi;
  d.G = G + Phi * WG * Phi.transpose();
  d.Q = Q + Phi.transpose() * Q * WPhi;
  symmetrize(d.G);
  symmetrize(d.Q);
  return d;
}

RiccatiFlowMap riccati_flow_map(const Mat& A, const Mat& B, const Mat& Q, double tau) {
  const Index n = A.rows();
  require(tau > 0.0, "flow map: tau must be positive");
  const Mat G = B * B.transpose();
  // [X; Y]' = K [X; Y] with P = Y X^{-1} solving P' = A'P + PA + Q - PGP
  Mat K(2 * n, 2 * n);
  K << -A, G, Q, A.transpose();
  const double k_norm = K.cwiseAbs().colwise().sum().maxCoeff();
  int doublings = 0;
  while (k_norm * tau / std::ldexp(1.0, doublings) > 0.5 && doublings < 60) ++doublings;
  const double tau0 = tau / std::ldexp(1.0, doublings);
  const Mat E = (K * tau0).exp();
  const Eigen::PartialPivLU<Mat> e11(E.topLeftCorner(n, n));
  RiccatiFlowMap f;
  f.Phi = e11.inverse();
  f.G = f.Phi * E.topRightCorner(n, n);
  f.Q = E.bottomLeftCorner(n, n) * f.Phi;
  symmetrize(f.G);
  symmetrize(f.Q);
  for (int d = 0; d < doublings; ++d) f = f.doubled();
  return f;
}

RiccatiSolution dre_solve_backward(const SystemOperators& sys, const CostSpec& cost, double dt,
                                   const DreOptions& options) {
  const Index n = sys.state_dim();
  require(n >= 1, "dre: empty system");
  if (n > kRiccatiDimCap) {
    throw InvalidArgument("dre: state dimension " + std::to_string(n) + " exceeds the cap " +
                          std::to_string(kRiccatiDimCap));
  }
  cost.validate(n);
  require(options.newton_max_iter >= 1, "dre: newton_max_iter must be >= 1");
  require(options.residual_every >= 1, "dre: residual_every must be >= 1");
  const Index N = step_count(cost.T, dt);

  Eigen::PartialPivLU<Mat> mass_lu(Mat(sys.M));
  const Mat Ah = mass_lu.solve(Mat(sys.A));
  const Mat Bh = mass_lu.solve(sys.B);
  const Mat Q = cost.weight();
  const double w = cost.control_weight;
  const Mat I = Mat::Identity(n, n);
  const double q_norm = Q.norm();
  const double a_norm = Ah.norm();
  const double g_norm = (Bh * Bh.transpose()).norm() / w;

  RiccatiSolution sol;
  sol.dt = dt;
  sol.scheme = options.scheme;
  sol.t_grid.resize(N + 1);
  for (Index k = 0; k <= N; ++k) sol.t_grid[k] = k * dt;
  sol.t_grid.back() = cost.T;
  sol.gains.assign(N + 1, Mat::Zero(Bh.cols(), n));
  sol.newton_iterations.assign(N, 0);

  const double bytes = double(n) * double(n) * sizeof(double);
  const Index stride = std::max<Index>(
      1, static_cast<Index>(std::ceil(bytes * double(N + 1) / (options.memory_cap_mb * 1048576.0))));

  std::vector<Index> snap_nodes;
  std::vector<Mat> snaps;
  double min_ratio = 0.0;
  auto record_snapshot = [&](Index k, const Mat& P) {
    const auto [lmin, nrm] = eig_extremes(P);
    const double r = ratio(lmin, nrm);
    if (r < -1e-8) {
      std::ostringstream os;
      os << "dre: P lost positive semidefiniteness at t = " << sol.t_grid[k]
         << " (lambda_min = " << lmin << ", ||P|| = " << nrm << ")";
      throw NumericalError(os.str());
    }
    min_ratio = std::min(min_ratio, r);
    snap_nodes.push_back(k);
    snaps.push_back(P);
  };

  const RiccatiFlowMap flow =
      options.scheme == DreScheme::exact_flow ? riccati_flow_map(Ah, Bh / std::sqrt(w), Q, dt) : RiccatiFlowMap{};

  // window of the most recent nodes: front = newest (smallest t)
  std::deque<Mat> recent;
  recent.push_front(Mat::Zero(n, n));
  record_snapshot(N, recent.front());

  // central-difference residual at node k + 1, once P_k is known
  auto log_residual = [&](Index k) {
    const Index j = k + 1;
    if (recent.size() < 3 || j > N - 1 || (N - j) % options.residual_every != 0) return;
    const Mat& Pj = recent[1];
    const Mat dP = (recent[2] - recent[0]) / (2.0 * dt);
    const Mat PB = Pj * Bh;
    const Mat res = dP + Ah.transpose() * Pj + Pj * Ah + Q - PB * PB.transpose() / w;
    const double p_norm = Pj.norm();
    sol.residual_log.push_back(
        {sol.t_grid[j], res.norm(), q_norm + 2.0 * a_norm * p_norm + g_norm * p_norm * p_norm});
  };

  for (Index k = N - 1; k >= 0; --k) {
    if (options.scheme == DreScheme::exact_flow) {
      Mat X = flow.apply(recent[0]);
      sol.newton_iterations[k] = 0;
      sol.gains[k] = Bh.transpose() * X / w;
      recent.push_front(std::move(X));
      if (recent.size() > 3) recent.pop_back();
      log_residual(k);
      if (k % stride == 0) record_snapshot(k, recent.front());
      continue;
    }
    const bool bdf = options.scheme == DreScheme::bdf2 && recent.size() >= 2;
    Mat As;
    Mat C0;
    if (bdf) {
      As = Ah - (0.75 / dt) * I;
      C0 = Q + (4.0 * recent[0] - recent[1]) / (2.0 * dt);
    } else {
      As = Ah - (0.5 / dt) * I;
      C0 = Q + recent[0] / dt;
    }
    const double c0_norm = C0.norm();

    Mat X = recent[0];
    bool converged = false;
    int it = 0;
    while (it < options.newton_max_iter) {
      ++it;
      const Mat XB = X * Bh;
      const Mat Ak = As - Bh * XB.transpose() / w;
      const Mat rhs = C0 + XB * XB.transpose() / w;
      Mat Xn = lyapunov_solve(Ak, rhs, options.parallel);
      symmetrize(Xn);
      const Mat DB = (Xn - X) * Bh;
      const double res = (DB.transpose() * DB).norm() / w;
      X = std::move(Xn);
      if (res <= options.newton_tol * c0_norm) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "dre: Newton-Kleinman did not converge in " << options.newton_max_iter
         << " iterations at t = " << sol.t_grid[k];
      throw NumericalError(os.str());
    }
    sol.newton_iterations[k] = it;
    sol.gains[k] = Bh.transpose() * X / w;

    recent.push_front(std::move(X));
    if (recent.size() > 3) recent.pop_back();

    log_residual(k);
    if (k % stride == 0) record_snapshot(k, recent.front());
  }

  std::reverse(snap_nodes.begin(), snap_nodes.end());
  std::reverse(snaps.begin(), snaps.end());
  std::reverse(sol.residual_log.begin(), sol.residual_log.end());
  sol.snapshot_nodes = std::move(snap_nodes);
  sol.snapshots = std::move(snaps);
  sol.min_eig_ratio = min_ratio;
  for (const auto& P : sol.snapshots) {
    sol.max_symmetry_error = std::max(sol.max_symmetry_error, (P - P.transpose()).cwiseAbs().maxCoeff());
  }
  return sol;
}

Mat RiccatiSolution::P_at(Index node) const {
  require(node >= 0 && node < nodes(), "P_at: node out of range");
  const auto it = std::lower_bound(snapshot_nodes.begin(), snapshot_nodes.end(), node);
  const std::size_t hi = std::size_t(it - snapshot_nodes.begin());
  if (snapshot_nodes[hi] == node) return snapshots[hi];
  const std::size_t lo = hi - 1;
  const double a = double(node - snapshot_nodes[lo]) / double(snapshot_nodes[hi] - snapshot_nodes[lo]);
  return (1.0 - a) * snapshots[lo] + a * snapshots[hi];
}

double RiccatiSolution::max_residual_ratio(double dt_factor) const {
  double worst = 0.0;
  for (const auto& e : residual_log) {
    const double bound = dt_factor * dt * e.scale;
    worst = std::max(worst, bound > 0.0 ? e.residual / bound : (e.residual > 0.0 ? INFINITY : 0.0));
  }
  return worst;
}

bool RiccatiStructure::ok(double tol) const {
  return symmetry_error == 0.0 && min_eig_ratio >= -tol && min_monotone_ratio >= -tol &&
         terminal_max_abs == 0.0;
}

RiccatiStructure check_structure(const RiccatiSolution& ricc) {
  RiccatiStructure s;
  for (std::size_t i = 0; i < ricc.snapshots.size(); ++i) {
    const Mat& P = ricc.snapshots[i];
    s.symmetry_error = std::max(s.symmetry_error, (P - P.transpose()).cwiseAbs().maxCoeff());
    const auto [lmin, nrm] = eig_extremes(P);
    s.min_eig_ratio = std::min(s.min_eig_ratio, ratio(lmin, nrm));
    if (i + 1 < ricc.snapshots.size()) {
      // earlier time carries more time-to-go: P(t1) - P(t2) >= 0 for t1 < t2
      const auto [dmin, dn] = eig_extremes(P - ricc.snapshots[i + 1]);
      (void)dn;
      s.min_monotone_ratio = std::min(s.min_monotone_ratio, ratio(dmin, nrm));
    }
  }
  if (!ricc.snapshots.empty()) s.terminal_max_abs = ricc.PT().cwiseAbs().maxCoeff();
  return s;
}

double quadrature_cost(const CostSpec& cost, const Trajectory& traj, const ControlSignal& g) {
  const Index N = traj.steps();
  require(N >= 1, "quadrature_cost: trajectory needs at least one step");
  const Mat RY = cost.R * traj.states;
  double state = 0.0;
  for (Index k = 0; k <= N; ++k) {
    const double wk = (k == 0 || k == N) ? 0.5 : 1.0;
    state += wk * RY.col(k).squaredNorm();
  }
  state *= traj.dt;
  double control = 0.0;
  for (Index j = 0; j < g.intervals(); ++j) control += g.width(j) * g.values.col(j).squaredNorm();
  return state + cost.control_weight * control;
}

ClosedLoopResult closed_loop_simulate(const SystemOperators& sys, const CostSpec& cost,
                                      const RiccatiSolution& ricc, const StateVector& y0,
                                      double theta) {
  const Index n = sys.state_dim();
  require(y0.size() == n, "closed_loop_simulate: initial state has wrong length");
  require(ricc.nodes() >= 2, "closed_loop_simulate: empty Riccati solution");
  require(ricc.gains.front().cols() == n, "closed_loop_simulate: Riccati solution built for another system");
  if (std::abs(ricc.t_grid.back() - cost.T) > 1e-9 * std::max(1.0, cost.T)) {
    throw InvalidArgument("closed_loop_simulate: Riccati grid ends at " +
                          std::to_string(ricc.t_grid.back()) + " but the cost horizon is " +
                          std::to_string(cost.T));
  }
  const Index N = ricc.nodes() - 1;
  const double dt = ricc.dt;
  const StepSolver solver(sys.M, sys.A, dt, theta);

  ClosedLoopResult out;
  Trajectory& traj = out.trajectory;
  traj.dt = dt;
  traj.theta = theta;
  traj.stepper = theta == 1.0 ? "implicit_euler" : (theta == 0.5 ? "crank_nicolson" : "theta");
  traj.t_grid = ricc.t_grid;
  traj.states.resize(n, N + 1);
  traj.states.col(0) = y0;
  Mat values(sys.control_dim(), N);
  for (Index k = 0; k < N; ++k) {
    const Vec g = -(ricc.gains[k] * traj.states.col(k));
    values.col(k) = g;
    traj.states.col(k + 1) = solver.step(traj.states.col(k), dt * (sys.B * g));
  }
  out.control = ControlSignal::uniform(values, cost.T);
  out.control.t_grid = ricc.t_grid;
  out.cost = quadrature_cost(cost, traj, out.control);
  return out;
}

double optimal_cost(const RiccatiSolution& ricc, const StateVector& y0) {
  require(!ricc.snapshots.empty() && ricc.snapshot_nodes.front() == 0,
          "optimal_cost: Riccati solution does not cover t = 0");
  require(y0.size() == ricc.P0().rows(), "optimal_cost: initial state has wrong length");
  return y0.dot(ricc.P0() * y0);
}

double gain_norm(const Mat& K, const SpMat& gram) {
  require(K.cols() == gram.rows(), "gain_norm: shape mismatch");
  if (K.size() == 0 || K.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::LLT<Mat> llt{Mat(gram)};
  if (llt.info() != Eigen::Success) throw NumericalError("gain_norm: Gram matrix is not positive definite");
  const Mat X = llt.matrixL().solve(K.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(X.transpose() * X, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace fsi
