#pragma once

// Data-parallel kernels. Each has a serial reference twin; both produce
// bitwise-identical results (the tests compare them, the benchmark times them).

#include "fsi/types.hpp"

#include <functional>
#include <vector>

namespace fsi::kernels {

/// Solves S'Y + YS = C in place (C becomes Y) for quasi-upper-triangular S
/// (real Schur form). Throws NumericalError when an eigenvalue pair
/// lambda_i + lambda_j is numerically zero.
void quasi_triangular_lyapunov_serial(const Mat& S, Mat& C);
void quasi_triangular_lyapunov_omp(const Mat& S, Mat& C);

using Advance = std::function<Vec(const Vec&)>;
using Observe = std::function<double(const Vec&)>;

/// Advances every column of Y0 `steps` times and records observe(y) at each
/// node. Result is (steps + 1) x Y0.cols().
Mat ensemble_observe_serial(const Mat& Y0, Index steps, const Advance& advance,
                            const Observe& observe);
Mat ensemble_observe_omp(const Mat& Y0, Index steps, const Advance& advance,
                         const Observe& observe);

/// Element loop producing triplets; triplet order matches the element order
/// in both variants, so the assembled sums are identical.
using ElementKernel = std::function<void(Index element, std::vector<Triplet>& out)>;

std::vector<Triplet> assemble_serial(Index elements, const ElementKernel& kernel);
std::vector<Triplet> assemble_omp(Index elements, const ElementKernel& kernel);

int max_threads();

}  // namespace fsi::kernels
