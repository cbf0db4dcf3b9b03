#pragma once

#include "fsi/types.hpp"

#include <string>

namespace fsi {

enum class MatrixSymmetry { general, symmetric };

/// Coordinate real format. With `symmetric` only the lower triangle is stored
/// and the matrix must be exactly symmetric. Values are written in shortest
/// round-trip form, so reading back gives identical entries.
std::string to_matrix_market(const SpMat& A, MatrixSymmetry symmetry = MatrixSymmetry::general);
SpMat parse_matrix_market(const std::string& text);

void write_matrix_market(const SpMat& A, const std::string& path,
                         MatrixSymmetry symmetry = MatrixSymmetry::general);
/// Dense input is stored by its nonzero entries.
void write_matrix_market(const Mat& A, const std::string& path,
                         MatrixSymmetry symmetry = MatrixSymmetry::general);
SpMat read_matrix_market(const std::string& path);

}  // namespace fsi
