#pragma once

#include "fsi/state_space.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace fsi {

/// J(g) = int |R y|^2 + control_weight |g|^2 dt over [0, T].
struct CostSpec {
  Mat R;
  double control_weight = 1.0;
  double T = 1.0;

  /// R'R equal to the energy Gram of the system.
  static CostSpec full_energy(const SystemOperators& sys, double T);
  void validate(Index state_dim) const;
  Mat weight() const { return R.transpose() * R; }
};

/// exact_flow: the flow of the DRE over one step is the linear fractional
///   map P -> Q_dt + Phi' P (I + G_dt P)^{-1} Phi; its coefficients come from
///   a small-step Hamiltonian exponential followed by doubling, so the time
///   stepping adds no discretization error and preserves the PSD order.
/// implicit_euler / bdf2: one shifted algebraic Riccati equation per step,
///   solved by Newton-Kleinman (each iterate one Lyapunov solve).
enum class DreScheme { exact_flow, implicit_euler, bdf2 };
DreScheme parse_dre_scheme(std::string_view name);
std::string to_string(DreScheme scheme);

struct DreOptions {
  DreScheme scheme = DreScheme::exact_flow;
  int newton_max_iter = 30;
  double newton_tol = 1e-13;     // relative NK residual
  double memory_cap_mb = 256.0;  // budget for stored P snapshots
  Index residual_every = 10;
  bool parallel = true;
};

/// Maximum state dimension accepted by the dense Riccati solver.
inline constexpr Index kRiccatiDimCap = 600;

struct ResidualEntry {
  double t;
  double residual;  // ||dP/dt + A'P + PA + Q - PGP||_F, central difference in t
  double scale;     // ||Q||_F + 2 ||A||_F ||P||_F + ||G||_F ||P||_F^2
};

struct RiccatiSolution {
  std::vector<double> t_grid;       // ascending, all nodes
  double dt = 0.0;
  std::vector<Mat> gains;           // per node: G_k = B^T P(t_k) / control_weight (M-scaled B)
  std::vector<Index> snapshot_nodes;  // ascending, always contains 0 and the last node
  std::vector<Mat> snapshots;       // P at snapshot_nodes
  std::vector<ResidualEntry> residual_log;
  std::vector<int> newton_iterations;  // per backward step
  double min_eig_ratio = 0.0;       // min over snapshots of lambda_min(P) / ||P||_2
  double max_symmetry_error = 0.0;  // max ||P - P'||_max over snapshots
  DreScheme scheme = DreScheme::exact_flow;

  Index nodes() const { return Index(t_grid.size()); }
  const Mat& P0() const { return snapshots.front(); }
  const Mat& PT() const { return snapshots.back(); }
  /// P at any node; linear interpolation between stored snapshots.
  Mat P_at(Index node) const;
  double max_residual_ratio(double dt_factor = 10.0) const;
};

/// Flow of P' = A'P + PA + Q - P B B' P over a time tau as the map
/// P -> Q + Phi' P (I + G P)^{-1} Phi.
struct RiccatiFlowMap {
  Mat Phi;
  Mat G;
  Mat Q;

  Mat apply(const Mat& P) const;
  /// The same map over twice the time (composition with itself).
  RiccatiFlowMap doubled() const;
};

RiccatiFlowMap riccati_flow_map(const Mat& A, const Mat& B, const Mat& Q, double tau);

/// Backward sweep from P(T) = 0 for -P' = Ah'P + P Ah + Q - P G P with
/// Ah = M^{-1}A, Bh = M^{-1}B, G = Bh Bh' / control_weight.
RiccatiSolution dre_solve_backward(const SystemOperators& sys, const CostSpec& cost, double dt,
                                   const DreOptions& options = {});

/// PSD and time-monotonicity of the stored snapshots.
struct RiccatiStructure {
  double symmetry_error = 0.0;      // max |P - P'|
  double min_eig_ratio = 0.0;       // min lambda_min(P) / ||P||
  double min_monotone_ratio = 0.0;  // min lambda_min(P(t1) - P(t2)) / ||P(t1)||, t1 < t2
  double terminal_max_abs = 0.0;    // max |P(T)|
  bool ok(double tol = 1e-8) const;
};

RiccatiStructure check_structure(const RiccatiSolution& ricc);

struct ClosedLoopResult {
  Trajectory trajectory;
  ControlSignal control;
  double cost = 0.0;
};

/// Steps the closed loop with g_k = -gain(t_k) y_k frozen over step k, using
/// the theta-scheme with the DRE grid.
ClosedLoopResult closed_loop_simulate(const SystemOperators& sys, const CostSpec& cost,
                                      const RiccatiSolution& ricc, const StateVector& y0,
                                      double theta = 0.5);

/// y0' P(0) y0.
double optimal_cost(const RiccatiSolution& ricc, const StateVector& y0);

/// Trapezoid for |Ry|^2 on the state grid plus exact integral of the
/// piecewise-constant control term.
double quadrature_cost(const CostSpec& cost, const Trajectory& traj, const ControlSignal& g);

/// Norm of the feedback map y -> K y measured from (R^n, gram) to R^m:
/// sqrt(lambda_max(K gram^{-1} K')).
double gain_norm(const Mat& K, const SpMat& gram);

}  // namespace fsi
