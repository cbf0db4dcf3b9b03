#include "fsi/lyapunov.hpp"

#include "fsi/kernels.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

namespace fsi {

RealSchur real_schur(const Mat& A) {
  require(A.rows() == A.cols(), "real_schur: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  RealSchur out{A, Mat(A.rows(), A.cols())};
  if (n == 0) return out;
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, out.S.data(), n,
                                        &sdim, wr.data(), wi.data(), out.U.data(), n);
  if (info != 0) {
    throw NumericalError("real_schur: dgees failed with info = " + std::to_string(info));
  }
  return out;
}

Mat lyapunov_solve(const RealSchur& schur, const Mat& Q, bool parallel) {
  require(Q.rows() == schur.S.rows() && Q.cols() == schur.S.cols(),
          "lyapunov_solve: Q must match A in size");
  Mat C = -(schur.U.transpose() * Q * schur.U);
  if (parallel) {
    kernels::quasi_triangular_lyapunov_omp(schur.S, C);
  } else {
    kernels::quasi_triangular_lyapunov_serial(schur.S, C);
  }
  Mat X = schur.U * C * schur.U.transpose();
  return 0.5 * (X + X.transpose());
}

Mat lyapunov_solve(const Mat& A, const Mat& Q, bool parallel) {
  require(A.rows() == A.cols(), "lyapunov_solve: A must be square");
  return lyapunov_solve(real_schur(A), Q, parallel);
}

double lyapunov_residual(const Mat& A, const Mat& X, const Mat& Q) {
  return (A.transpose() * X + X * A + Q).norm();
}

}  // namespace fsi
