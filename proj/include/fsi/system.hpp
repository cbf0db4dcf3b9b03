#pragma once

#include "fsi/types.hpp"

#include <string>

namespace fsi {

/// Symmetric pair (K, M) for the generalized eigenproblem K v = lambda M v.
/// An empty pair stands for the identity operator.
struct SpdPair {
  SpMat stiffness;
  SpMat mass;

  bool empty() const { return mass.rows() == 0; }
};

/// Discrete coupled system M y' = A y + B g with observation, trace and the
/// auxiliary forms the diagnostics need. Immutable once assembled.
struct SystemOperators {
  std::string model = "generic";
  int level = 0;
  double h = 0.0;  // mesh size, 0 when there is no mesh

  SpMat M;  // n x n, SPD
  SpMat A;  // n x n generator
  Mat B;    // n x m control injection
  Mat Tr;   // m x n interface trace
  Mat boundary_mass;  // m x m interface form <g, h>
  Mat R;    // r x n observation, R'R = energy Gram for the full-energy cost
  SpMat energy;  // E, energy(y) = 1/2 y'E y
  SpMat y_gram;  // Y inner product (energy plus solid L2 mass on w)
  IndexMap blocks;

  // Fluid operator alone (fluid elements only, natural condition on the
  // interface) acting on the u block: M_f u' = -K_f u.
  SpMat fluid_mass;
  SpMat fluid_stiffness;

  // Fractional-power pairs. Per-block: fluid / displacement / (identity)
  // solid velocity. Coupled: velocity field over the concatenation (u, w_t).
  SpdPair frac_fluid;
  SpdPair frac_displacement;
  SpdPair frac_velocity;

  // Deterministic profiles used by make_initial_state.
  Vec smooth_profile;
  Vec delta_profile;  // state concentrated on a single interior fluid node

  // 2D only: physical velocity = lift * u_block, divergence acts on physical velocity.
  Mat lift;
  SpMat divergence;

  Index state_dim() const { return M.rows(); }
  Index control_dim() const { return B.cols(); }
};

/// Wraps plain matrices as a system with a single u block. Trace is B' and
/// the boundary form is the identity, so the adjoint identity holds by
/// construction. Used for scalar and random test problems.
SystemOperators make_generic_system(const Mat& A, const Mat& B, const Mat& R,
                                    const Mat& M = Mat());

}  // namespace fsi
