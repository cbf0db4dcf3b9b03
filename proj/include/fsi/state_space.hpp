#pragma once

#include "fsi/system.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fsi {

/// State y = (u, w, w_t) laid out per SystemOperators::blocks.
using StateVector = Vec;

/// Piecewise-constant control: values.col(k) acts on [t_grid[k], t_grid[k+1]).
struct ControlSignal {
  std::vector<double> t_grid;
  Mat values;  // m x (t_grid.size() - 1)

  static ControlSignal zeros(Index m, double T, double dt);
  static ControlSignal uniform(const Mat& values, double T);

  Index dim() const { return values.rows(); }
  Index intervals() const { return values.cols(); }
  double horizon() const { return t_grid.empty() ? 0.0 : t_grid.back(); }
  double width(Index k) const { return t_grid[k + 1] - t_grid[k]; }

  /// L2(0,T; R^m) inner product and norm.
  double dot(const ControlSignal& other) const;
  double norm() const;
};

struct Trajectory {
  std::vector<double> t_grid;
  Mat states;  // n x (steps + 1)
  std::string stepper = "theta";
  double dt = 0.0;
  double theta = 1.0;

  Index steps() const { return states.cols() - 1; }
};

struct FluidDecomposition {
  Mat u1;  // free fluid evolution, u-block rows x nodes
  Mat u2;  // u - u1
};

/// Cached factorization of (M - theta dt A). Dense LU when the matrix is
/// effectively dense, sparse LU otherwise.
class StepSolver {
 public:
  StepSolver(const SpMat& M, const SpMat& A, double dt, double theta);
  ~StepSolver();
  StepSolver(StepSolver&&) noexcept;
  StepSolver& operator=(StepSolver&&) noexcept;

  /// One step: returns y_next from y and the load dt * B g (already scaled).
  Vec step(const Vec& y, const Vec& load) const;
  /// Multi-column version of step without load.
  Mat step_many(const Mat& Y) const;
  /// Solves (M - theta dt A)' x = rhs.
  Vec solve_transpose(const Vec& rhs) const;
  /// (M + (1 - theta) dt A)' x, the transposed explicit part.
  Vec explicit_transpose(const Vec& x) const;

  double dt() const { return dt_; }
  double theta() const { return theta_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double dt_;
  double theta_;
};

/// theta-method steps (M - th dt A) y+ = (M + (1 - th) dt A) y + dt B g_k.
Trajectory propagate_theta(const SystemOperators& sys, const StateVector& y0,
                           const ControlSignal& g, double dt, double theta);

/// Uncontrolled propagation over [0, T].
Trajectory propagate_free(const SystemOperators& sys, const StateVector& y0, double T,
                          double dt, double theta);

/// Index of the control interval that acts on step k (by step midpoint).
std::vector<Index> control_interval_map(const ControlSignal& g, Index steps, double dt);

/// Splits the fluid block into the free fluid evolution u1 (same stepper,
/// zero interface load, started from u(0)) and the remainder u2 = u - u1.
FluidDecomposition decompose_fluid(const SystemOperators& sys, const Trajectory& traj);

/// Free fluid evolution of several initial u-blocks at once; returns the
/// interface-trace L2 norm of each column at every node, (steps+1) x columns.
Mat fluid_free_trace_norms(const SystemOperators& sys, const Mat& u0, double dt,
                           Index steps, double theta, bool parallel = true);

enum class FractionalMode {
  per_block,         // fluid viscous, solid elastic(+mass), solid velocity identity
  velocity_coupled,  // (u, w_t) smoothed as one velocity field, w elastic(+mass)
};

FractionalMode parse_fractional_mode(std::string_view name);

/// Largest pair dimension accepted by the fractional calculus.
inline constexpr Index kFractionalDimCap = 600;

/// Dense matrix of the component fractional power of order s in [-1, 1].
Mat fractional_power_matrix(const SystemOperators& sys, double s,
                            FractionalMode mode = FractionalMode::per_block);

StateVector apply_component_fractional_power(const SystemOperators& sys, double s,
                                             const StateVector& y,
                                             FractionalMode mode = FractionalMode::per_block);

/// (K, M)^s on plain vectors: V diag(lambda^s) V' M x with V'MV = I.
Mat pair_fractional_power(const SpdPair& pair, double s);

double energy_of(const SystemOperators& sys, const StateVector& y);
/// sqrt(y'Ey); a state with energy 1/2 has energy norm 1.
double energy_norm(const SystemOperators& sys, const StateVector& y);
double y_norm(const SystemOperators& sys, const StateVector& y);

Vec interface_trace(const SystemOperators& sys, const StateVector& y);
/// L2(interface) norm of a trace vector.
double trace_norm(const SystemOperators& sys, const Vec& trace);

enum class InitialKind { random_energy_unit, smooth, delta_like };

InitialKind parse_initial_kind(std::string_view name);
std::string to_string(InitialKind kind);

StateVector make_initial_state(const SystemOperators& sys, InitialKind kind,
                               std::uint64_t seed);

/// max over nodes of |D lift u_k|_inf / max(1, |lift u_k|_inf); 0 without a
/// divergence operator.
double divergence_residual(const SystemOperators& sys, const Trajectory& traj);

/// max over steps of (energy(y_k+1) - energy(y_k)) / energy(y_0).
double max_energy_increase(const SystemOperators& sys, const Trajectory& traj);

/// max over random (y, g) of |g'(B'y) - <g, Tr y>| / (|g| |B| |y|).
double adjoint_identity_error(const SystemOperators& sys, Index pairs = 100,
                              std::uint64_t seed = 11);

/// R with R'R = gram for a symmetric positive semidefinite gram.
Mat observation_factor(const SpMat& gram);

}  // namespace fsi
