#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Index = Eigen::Index;

/// Contiguous range [start, start + size) inside a state vector.
struct BlockRange {
  Index start = 0;
  Index size = 0;

  Index end() const { return start + size; }
  bool contains(Index i) const { return i >= start && i < end(); }
};

/// Block layout of a coupled state y = (u, w, w_t).
struct IndexMap {
  BlockRange u;   // fluid velocity
  BlockRange w;   // solid displacement
  BlockRange wt;  // solid velocity (interface values live in u)

  Index total() const { return u.size + w.size + wt.size; }
};

/// Precondition or input-validation failure.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (singular factor, non-convergence, lost definiteness).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace fsi
