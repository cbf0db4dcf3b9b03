#pragma once

#include "fsi/types.hpp"

namespace fsi {

/// Real Schur form A = U S U' (S quasi upper triangular, U orthogonal).
struct RealSchur {
  Mat S;
  Mat U;
};

RealSchur real_schur(const Mat& A);

/// Solves A'X + XA + Q = 0 by Bartels-Stewart (real Schur reduction of A,
/// quasi-triangular back-substitution, back-transformation). The result is
/// symmetrized. Throws NumericalError when A and -A share an eigenvalue.
Mat lyapunov_solve(const Mat& A, const Mat& Q, bool parallel = true);

/// Same, reusing a precomputed Schur form of A.
Mat lyapunov_solve(const RealSchur& schur, const Mat& Q, bool parallel = true);

/// ||A'X + XA + Q||_F
double lyapunov_residual(const Mat& A, const Mat& X, const Mat& Q);

}  // namespace fsi
