#include "fsi/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace fsi::kernels {

namespace {

struct DiagBlock {
  Index start;
  Index size;
};

std::vector<DiagBlock> diagonal_blocks(const Mat& S) {
  std::vector<DiagBlock> blocks;
  const Index n = S.rows();
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && S(i + 1, i) != 0.0) {
      blocks.push_back({i, 2});
      i += 2;
    } else {
      blocks.push_back({i, 1});
      i += 1;
    }
  }
  return blocks;
}

std::string block_eigenvalues(const Mat& S, const DiagBlock& b) {
  std::ostringstream os;
  if (b.size == 1) {
    os << S(b.start, b.start);
  } else {
    const double a = S(b.start, b.start), bb = S(b.start, b.start + 1);
    const double c = S(b.start + 1, b.start), d = S(b.start + 1, b.start + 1);
    const std::complex<double> disc = std::sqrt(std::complex<double>((a - d) * (a - d) / 4.0 + bb * c));
    os << (a + d) / 2.0 << " +/- " << disc;
  }
  return os.str();
}

// Solves S_ii' X + X S_jj = F for the (p x q) block X, p, q in {1, 2}.
void small_sylvester(const Mat& S, const DiagBlock& bi, const DiagBlock& bj, double tol,
                     double* F, Index ldf) {
  const Index p = bi.size;
  const Index q = bj.size;
  if (p == 1 && q == 1) {
    const double k = S(bi.start, bi.start) + S(bj.start, bj.start);
    if (std::abs(k) <= tol) {
      throw NumericalError("lyapunov: eigenvalues " + block_eigenvalues(S, bi) + " and " +
                           block_eigenvalues(S, bj) + " nearly cancel (ill-posed)");
    }
    F[0] /= k;
    return;
  }
  // vec(S_ii' X + X S_jj) = (I_q (x) S_ii' + S_jj' (x) I_p) vec(X)
  Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
  Eigen::Vector4d f = Eigen::Vector4d::Zero();
  const Index dim = p * q;
  for (Index c = 0; c < q; ++c) {
    for (Index r = 0; r < p; ++r) {
      const Index row = c * p + r;
      f[row] = F[r + c * ldf];
      for (Index r2 = 0; r2 < p; ++r2) K(row, c * p + r2) += S(bi.start + r2, bi.start + r);
      for (Index c2 = 0; c2 < q; ++c2) K(row, c2 * p + r) += S(bj.start + c2, bj.start + c);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K.topLeftCorner(dim, dim));
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= tol) {
    throw NumericalError("lyapunov: eigenvalues " + block_eigenvalues(S, bi) + " and " +
                         block_eigenvalues(S, bj) + " nearly cancel (ill-posed)");
  }
  const Eigen::VectorXd x = lu.solve(f.head(dim));
  for (Index c = 0; c < q; ++c)
    for (Index r = 0; r < p; ++r) F[r + c * ldf] = x[c * p + r];
}

// Forward substitution for column block J: S' Y_J + Y_J S_JJ = C_J.
void solve_column_block(const Mat& S, const std::vector<DiagBlock>& blocks, const DiagBlock& bj,
                        double tol, Mat& C) {
  const Index n = S.rows();
  for (const auto& bi : blocks) {
    small_sylvester(S, bi, bj, tol, &C(bi.start, bj.start), C.outerStride());
    // rows below bi: C(K, J) -= S(I, K)' Y(I, J)
    for (Index c = bj.start; c < bj.start + bj.size; ++c) {
      for (Index r = bi.start + bi.size; r < n; ++r) {
        double acc = S(bi.start, r) * C(bi.start, c);
        if (bi.size == 2) acc += S(bi.start + 1, r) * C(bi.start + 1, c);
        C(r, c) -= acc;
      }
    }
  }
}

// C(:, k) -= Y_J S(J, k) for a single later column k.
inline void update_column(const Mat& S, const DiagBlock& bj, Index k, Mat& C) {
  const Index n = S.rows();
  const double s0 = S(bj.start, k);
  const double s1 = bj.size == 2 ? S(bj.start + 1, k) : 0.0;
  for (Index r = 0; r < n; ++r) {
    double acc = C(r, bj.start) * s0;
    if (bj.size == 2) acc += C(r, bj.start + 1) * s1;
    C(r, k) -= acc;
  }
}

double singular_tol(const Mat& S) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  return 1e3 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

void quasi_triangular_lyapunov_serial(const Mat& S, Mat& C) {
  const auto blocks = diagonal_blocks(S);
  const double tol = singular_tol(S);
  const Index n = S.rows();
  for (const auto& bj : blocks) {
    solve_column_block(S, blocks, bj, tol, C);
    for (Index k = bj.start + bj.size; k < n; ++k) update_column(S, bj, k, C);
  }
}

void quasi_triangular_lyapunov_omp(const Mat& S, Mat& C) {
  const auto blocks = diagonal_blocks(S);
  const double tol = singular_tol(S);
  const Index n = S.rows();
  for (const auto& bj : blocks) {
    solve_column_block(S, blocks, bj, tol, C);
    const Index first = bj.start + bj.size;
#pragma omp parallel for schedule(static) if (n - first > 64)
    for (Index k = first; k < n; ++k) update_column(S, bj, k, C);
  }
}

Mat ensemble_observe_serial(const Mat& Y0, Index steps, const Advance& advance,
                            const Observe& observe) {
  Mat out(steps + 1, Y0.cols());
  for (Index c = 0; c < Y0.cols(); ++c) {
    Vec y = Y0.col(c);
    out(0, c) = observe(y);
    for (Index k = 1; k <= steps; ++k) {
      y = advance(y);
      out(k, c) = observe(y);
    }
  }
  return out;
}

Mat ensemble_observe_omp(const Mat& Y0, Index steps, const Advance& advance,
                         const Observe& observe) {
  Mat out(steps + 1, Y0.cols());
#pragma omp parallel for schedule(dynamic, 1)
  for (Index c = 0; c < Y0.cols(); ++c) {
    Vec y = Y0.col(c);
    out(0, c) = observe(y);
    for (Index k = 1; k <= steps; ++k) {
      y = advance(y);
      out(k, c) = observe(y);
    }
  }
  return out;
}

std::vector<Triplet> assemble_serial(Index elements, const ElementKernel& kernel) {
  std::vector<Triplet> out;
  for (Index e = 0; e < elements; ++e) kernel(e, out);
  return out;
}

std::vector<Triplet> assemble_omp(Index elements, const ElementKernel& kernel) {
  const int threads = omp_get_max_threads();
  std::vector<std::vector<Triplet>> local(threads);
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    // contiguous chunks keep the concatenated order equal to the element order
    const Index chunk = (elements + nt - 1) / nt;
    const Index begin = std::min<Index>(elements, tid * chunk);
    const Index end = std::min<Index>(elements, begin + chunk);
    for (Index e = begin; e < end; ++e) kernel(e, local[tid]);
  }
  std::vector<Triplet> out;
  std::size_t total = 0;
  for (const auto& l : local) total += l.size();
  out.reserve(total);
  for (const auto& l : local) out.insert(out.end(), l.begin(), l.end());
  return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fsi::kernels
